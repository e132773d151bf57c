//! Closed-form reference curves.
//!
//! Spherical circles, spherical helices, circular helices, constant
//! precession curves and the Bessel-series form of the third J step. All
//! are unit speed (except the speed-2 geodesic circle) and are built on
//! jets, so every derivative is exact.

use crate::bessel::{cos_coefficients, sin_coefficients, BesselTruncation};
use crate::curve::{Curve3, Singularity};
use crate::error::{Error, Result};
use crate::jet::{Jet, VJet};
use crate::quadrature::Interval;
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Distance from resonance below which series denominators are rejected.
pub const RESONANCE_DELTA: f64 = 1e-3;

/// Parameters shared by the gallery families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GalleryParams {
    /// Axis offset (spherical) or helix radius (Euclidean).
    pub a: f64,
    /// Circle radius.
    pub r: f64,
    /// Angular rate 1/r.
    pub w: f64,
    /// Pitch.
    pub b: f64,
    /// ±1.
    pub epsilon: f64,
    /// Phase θ₀ (or c₀).
    pub theta0: f64,
}

impl GalleryParams {
    /// Spherical circle data: r = √(1 − a²), w = 1/r.
    pub fn spherical(a: f64, theta0: f64) -> Result<Self> {
        if !(a.abs() < 1.0) {
            return Err(Error::BadParams(format!("spherical circle needs |a| < 1, got {a}")));
        }
        let r = (1.0 - a * a).sqrt();
        Ok(GalleryParams { a, r, w: 1.0 / r, b: 0.0, epsilon: 1.0, theta0 })
    }

    /// Euclidean helix data: r = √(a² + b²), w = 1/r.
    pub fn euclidean(a: f64, b: f64, epsilon: f64, theta0: f64) -> Result<Self> {
        let r = (a * a + b * b).sqrt();
        let p = GalleryParams { a, r, w: 1.0 / r, b, epsilon, theta0 };
        p.validate_euclidean()?;
        Ok(p)
    }

    pub fn validate_spherical(&self) -> Result<()> {
        if (self.a * self.a + self.r * self.r - 1.0).abs() > 1e-12 {
            return Err(Error::BadParams(format!("a² + r² = {} ≠ 1", self.a * self.a + self.r * self.r)));
        }
        Ok(())
    }

    pub fn validate_euclidean(&self) -> Result<()> {
        if !(self.a > 0.0) || self.b == 0.0 || !self.b.is_finite() || !(self.w > 0.0) {
            return Err(Error::BadParams(format!("need a > 0, b ≠ 0, w > 0 (a={}, b={}, w={})", self.a, self.b, self.w)));
        }
        if self.epsilon != 1.0 && self.epsilon != -1.0 {
            return Err(Error::BadParams(format!("epsilon must be ±1, got {}", self.epsilon)));
        }
        Ok(())
    }
}

fn interval(min: f64, max: f64) -> Interval {
    Interval { min, max }
}

/// Orthonormal e₁, e₂ with e₁ × e₂ = axis; (x̂, ŷ) for the z axis.
fn plane_basis(axis: Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let x = Vector3::x();
    let mut e1 = x - axis * axis.dot(&x);
    if e1.norm() < 1e-8 {
        let y = Vector3::y();
        e1 = y - axis * axis.dot(&y);
    }
    let e1 = e1.normalize();
    (e1, axis.cross(&e1))
}

/// Unit-speed circle S¹(a⃗, r) on the unit sphere, centred at a⃗ in the plane
/// orthogonal to it: for a⃗ = (0,0,a) this is (r cos ws, r sin ws, a).
pub fn circle(a_vec: Vector3<f64>, r: f64) -> Result<Curve3> {
    let a = a_vec.norm();
    if !(r > 0.0) || (a * a + r * r - 1.0).abs() > 1e-12 {
        return Err(Error::BadParams(format!("spherical circle needs ‖a‖² + r² = 1 (‖a‖ = {a}, r = {r})")));
    }
    let axis = if a > 0.0 { a_vec / a } else { Vector3::z() };
    let (e1, e2) = plane_basis(axis);
    let w = 1.0 / r;
    Ok(Curve3::analytic(interval(0.0, 2.0 * PI * r), move |s| {
        let (sn, cs) = (s * w).sin_cos();
        let c = cs * r;
        let d = sn * r;
        VJet::new(c * e1.x + d * e2.x + a_vec.x, c * e1.y + d * e2.y + a_vec.y, c * e1.z + d * e2.z + a_vec.z)
    })
    .with_spherical(true))
}

/// Unit-speed plane circle (r cos(s/r), r sin(s/r), 0).
pub fn plane_circle(r: f64) -> Result<Curve3> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::BadParams(format!("radius must be positive, got {r}")));
    }
    let w = 1.0 / r;
    Ok(Curve3::analytic(interval(0.0, 2.0 * PI * r), move |s| {
        let (sn, cs) = (s * w).sin_cos();
        VJet::new(cs * r, sn * r, Jet::constant(0.0, s.order()))
    }))
}

/// The speed-2 great circle (−sin 2t/√2, sin 2t/√2, cos 2t) on [0, π].
pub fn geodesic_circle_example() -> Curve3 {
    Curve3::analytic(interval(0.0, PI), |t| {
        let (sn, cs) = (t * 2.0).sin_cos();
        VJet::new(sn * -FRAC_1_SQRT_2, sn * FRAC_1_SQRT_2, cs)
    })
    .with_spherical(true)
}

/// Its I image for θ₀ = 0: ε(cos 2t/√2, −cos 2t/√2, sin 2t).
pub fn geodesic_circle_image(epsilon: f64) -> Curve3 {
    Curve3::analytic(interval(0.0, PI), move |t| {
        let (sn, cs) = (t * 2.0).sin_cos();
        VJet::new(cs * (epsilon * FRAC_1_SQRT_2), cs * (-epsilon * FRAC_1_SQRT_2), sn * epsilon)
    })
    .with_spherical(true)
}

/// The spherical helix ∫cos(aws + θ₀)(r cos ws, r sin ws, a) ds in closed
/// form, on [0, 4πr]. Cusps sit where cos(aws + θ₀) = 0.
pub fn spherical_helix(a: f64, r: f64, theta0: f64) -> Result<Curve3> {
    let p = GalleryParams { a, r, w: 1.0 / r, b: 0.0, epsilon: 1.0, theta0 };
    p.validate_spherical()?;
    if a == 0.0 || a.abs() >= 1.0 || !(r > 0.0) {
        return Err(Error::BadParams(format!("spherical helix needs 0 < |a| < 1 (a = {a})")));
    }
    let w = p.w;
    let (wp, wm) = (w * (a + 1.0), w * (a - 1.0));
    let domain = interval(0.0, 4.0 * PI * r);
    let rate = a * w;
    // cusps at rate·s + θ₀ = π/2 + kπ
    let (u0, u1) = (theta0 - 0.5 * PI, rate * domain.max + theta0 - 0.5 * PI);
    let (lo, hi) = (u0.min(u1), u0.max(u1));
    let half_width = (crate::curve::SPEED_FLOOR / rate.abs()).min(1e-3);
    let cusps: Vec<Singularity> = ((lo / PI).ceil() as i64..=(hi / PI).floor() as i64)
        .map(|k| Singularity { t: (0.5 * PI + k as f64 * PI - theta0) / rate, half_width })
        .filter(|c| domain.contains(c.t))
        .collect();
    Ok(Curve3::analytic(domain, move |s| {
        let (sp, cp) = (s * wp + theta0).sin_cos();
        let (sm, cm) = (s * wm + theta0).sin_cos();
        let x = (sp * (1.0 / wp) + sm * (1.0 / wm)) * (0.5 * r);
        let y = (cp * (-1.0 / wp) + cm * (1.0 / wm)) * (0.5 * r);
        let z = (s * rate + theta0).sin() * r;
        VJet::new(x, y, z)
    })
    .with_spherical(true)
    .with_singular(cusps))
}

/// The circular helix (a cos ws, a sin ws, bws), w = 1/√(a² + b²), over one turn.
pub fn circular_helix(a: f64, b: f64) -> Result<Curve3> {
    let p = GalleryParams::euclidean(a, b, 1.0, 0.0)?;
    let w = p.w;
    Ok(Curve3::analytic(interval(0.0, 2.0 * PI / w), move |s| {
        let (sn, cs) = (s * w).sin_cos();
        VJet::new(cs * a, sn * a, s * (b * w))
    }))
}

/// The constant precession curve in closed form, on [0, 2π]:
///
/// x = (εa²w/2)[sin(w(1+bw)s)/(1+bw)² + sin(w(1−bw)s)/(1−bw)²],
/// y = −(εa²w/2)[cos(w(1+bw)s)/(1+bw)² + cos(w(1−bw)s)/(1−bw)²],
/// z = −(εa/(bw)) cos(bw²s).
pub fn constant_precession(a: f64, b: f64, w: f64, epsilon: f64) -> Result<Curve3> {
    let p = GalleryParams { a, r: (a * a + b * b).sqrt(), w, b, epsilon, theta0: 0.0 };
    p.validate_euclidean()?;
    let (up, um) = (1.0 + b * w, 1.0 - b * w);
    for d in [up, um] {
        if d.abs() < RESONANCE_DELTA {
            return Err(Error::ResonantParameters { value: d, delta: RESONANCE_DELTA });
        }
    }
    let k = 0.5 * epsilon * a * a * w;
    Ok(Curve3::analytic(interval(0.0, 2.0 * PI), move |s| {
        let (sp, cp) = (s * (w * up)).sin_cos();
        let (sm, cm) = (s * (w * um)).sin_cos();
        let x = (sp * (1.0 / (up * up)) + sm * (1.0 / (um * um))) * k;
        let y = (cp * (1.0 / (up * up)) + cm * (1.0 / (um * um))) * -k;
        let z = (s * (b * w * w)).cos() * (-epsilon * a / (b * w));
        VJet::new(x, y, z)
    }))
}

/// A trigonometric polynomial Σ c·cos(Ωs) + d·sin(Ωs) with Ω = ι·w + m·bw²,
/// keyed by the integer pair (ι, m) normalised to be non-negative.
#[derive(Clone, Debug, Default, PartialEq)]
struct Trig {
    terms: BTreeMap<(i32, i32), (f64, f64)>,
}

impl Trig {
    fn add(&mut self, key: (i32, i32), c: f64, d: f64) {
        let (key, d) = if key.0 < 0 || (key.0 == 0 && key.1 < 0) { ((-key.0, -key.1), -d) } else { (key, d) };
        let e = self.terms.entry(key).or_insert((0.0, 0.0));
        e.0 += c;
        e.1 += if key == (0, 0) { 0.0 } else { d };
    }

    fn cos(key: (i32, i32), c: f64) -> Self {
        let mut t = Trig::default();
        t.add(key, c, 0.0);
        t
    }

    fn sin(key: (i32, i32), d: f64) -> Self {
        let mut t = Trig::default();
        t.add(key, 0.0, d);
        t
    }

    fn scale(&self, k: f64) -> Self {
        let mut out = Trig::default();
        for (&key, &(c, d)) in &self.terms {
            out.add(key, c * k, d * k);
        }
        out
    }

    fn plus(&self, other: &Trig) -> Self {
        let mut out = self.clone();
        for (&key, &(c, d)) in &other.terms {
            out.add(key, c, d);
        }
        out
    }

    fn mul(&self, other: &Trig) -> Self {
        let mut out = Trig::default();
        for (&(i1, m1), &(c1, d1)) in &self.terms {
            for (&(i2, m2), &(c2, d2)) in &other.terms {
                let sum = (i1 + i2, m1 + m2);
                let diff = (i1 - i2, m1 - m2);
                // cos·cos, sin·sin, sin·cos, cos·sin
                out.add(diff, 0.5 * (c1 * c2 + d1 * d2), 0.5 * (d1 * c2 - c1 * d2));
                out.add(sum, 0.5 * (c1 * c2 - d1 * d2), 0.5 * (d1 * c2 + c1 * d2));
            }
        }
        out
    }

    /// Termwise antiderivative; the constant term becomes a secular slope.
    fn integrate(&self, w: f64, bw: f64) -> Result<(Trig, f64)> {
        let mut out = Trig::default();
        let mut slope = 0.0;
        for (&(i, m), &(c, d)) in &self.terms {
            if (i, m) == (0, 0) {
                slope += c;
                continue;
            }
            let ratio = i as f64 + m as f64 * bw;
            if ratio.abs() < RESONANCE_DELTA {
                return Err(Error::ResonantParameters { value: ratio, delta: RESONANCE_DELTA });
            }
            let omega = w * ratio;
            out.add((i, m), -d / omega, c / omega);
        }
        Ok((out, slope))
    }

    fn eval(&self, s: Jet, w: f64, bw2: f64) -> Jet {
        let mut acc = Jet::constant(0.0, s.order());
        for (&(i, m), &(c, d)) in &self.terms {
            let (sn, cs) = (s * (i as f64 * w + m as f64 * bw2)).sin_cos();
            acc = acc + cs * c + sn * d;
        }
        acc
    }
}

/// Truncated Bessel-series form of the third J step from a circle seed.
///
/// The level-2 curve has tangent frame T₂ = −cos φ N₁ + sin φ B₁, N₂ = T₁ for
/// the helix (a cos ws, a sin ws, bws), with φ = bw²s. The third step uses
/// θ₂(s) = θ₀ − (a/b) cos φ, so T₃ = −cos θ₂·T₁ + sin θ₂·B₂; cos θ₂ and
/// sin θ₂ are expanded by Jacobi–Anger and integrated term by term.
#[derive(Clone, Debug)]
pub struct J3Series {
    params: GalleryParams,
    xyz: [Trig; 3],
    slopes: [f64; 3],
    truncation: BesselTruncation,
}

impl J3Series {
    pub fn new(params: &GalleryParams, terms: usize) -> Result<Self> {
        params.validate_euclidean()?;
        let GalleryParams { a, b, w, theta0, .. } = *params;
        let x = a / b;
        let cc = cos_coefficients(x, terms)?;
        let sc = sin_coefficients(x, terms)?;
        let (s0, c0) = theta0.sin_cos();
        let mut d = Trig::default();
        let mut g = Trig::default();
        for j in 0..cc.len() {
            d.add((0, j as i32), c0 * cc[j] + s0 * sc[j], 0.0);
            g.add((0, j as i32), s0 * cc[j] - c0 * sc[j], 0.0);
        }
        let (aw, bw) = (a * w, b * w);
        let cos_phi = Trig::cos((0, 1), 1.0);
        let sin_phi = Trig::sin((0, 1), 1.0);
        let cos_ws = Trig::cos((1, 0), 1.0);
        let sin_ws = Trig::sin((1, 0), 1.0);
        // T₁ = (−aw sin ws, aw cos ws, bw)
        let t1 = [sin_ws.scale(-aw), cos_ws.scale(aw), Trig::cos((0, 0), bw)];
        // B₂ = cos φ (bw sin ws, −bw cos ws, aw) + sin φ (−cos ws, −sin ws, 0)
        let b2 = [
            cos_phi.mul(&sin_ws).scale(bw).plus(&sin_phi.mul(&cos_ws).scale(-1.0)),
            cos_phi.mul(&cos_ws).scale(-bw).plus(&sin_phi.mul(&sin_ws).scale(-1.0)),
            cos_phi.scale(aw),
        ];
        let mut xyz: [Trig; 3] = Default::default();
        let mut slopes = [0.0; 3];
        for i in 0..3 {
            let integrand = d.mul(&t1[i]).scale(-1.0).plus(&g.mul(&b2[i]));
            let (f, slope) = integrand.integrate(w, bw)?;
            xyz[i] = f;
            slopes[i] = slope;
        }
        Ok(J3Series { params: *params, xyz, slopes, truncation: BesselTruncation::new(x, terms)? })
    }

    pub fn truncation(&self) -> BesselTruncation {
        self.truncation
    }

    /// Secular drift per unit s; only z is non-zero: −εw cos θ₀ (b J₀(a/b) + a J₁(a/b)).
    pub fn secular_slope(&self) -> Vector3<f64> {
        Vector3::from(self.slopes) * self.params.epsilon
    }

    fn eval_jet(&self, s: Jet) -> VJet {
        let GalleryParams { b, w, epsilon, .. } = self.params;
        let bw2 = b * w * w;
        let c = |i: usize| (self.xyz[i].eval(s, w, bw2) + s * self.slopes[i]) * epsilon;
        VJet::new(c(0), c(1), c(2))
    }

    pub fn point(&self, s: f64) -> Vector3<f64> {
        self.eval_jet(Jet::constant(s, 0)).value()
    }

    /// The series as a curve on `domain`.
    pub fn curve(&self, domain: Interval) -> Curve3 {
        let me = self.clone();
        Curve3::analytic(domain, move |s| me.eval_jet(s))
    }
}

/// One point of the truncated series; see [`J3Series`].
pub fn j3_partial_series(params: &GalleryParams, terms: usize, s: f64) -> Result<Vector3<f64>> {
    Ok(J3Series::new(params, terms)?.point(s))
}
