//! Moving frames along curves: Frenet, Sabban, the ψ hierarchy and the
//! centrode (Darboux vector).
//!
//! The ψ hierarchy normalizes successive derivatives: ψ₁ = T and
//! ψ_{k+1} = ψ_k'/‖ψ_k'‖. Level k carries its own Frenet apparatus
//! T_k = ψ_{k+1}, N_k = ψ_{k+2}, B_k = T_k × N_k with curvature κ_k and
//! torsion τ_k, all measured per unit arc length of the base curve.

use crate::curve::Curve3;
use crate::error::{Error, Result};
use crate::jet::{det3, VJet};
use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

/// Curvatures below this count as an inflection.
pub const INFLECTION_TOL: f64 = 1e-9;

/// Frenet apparatus at one parameter value.
///
/// `normal`, `binormal` and `tau` are absent at inflection points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrenetData {
    pub t: f64,
    pub tangent: Vector3<f64>,
    pub normal: Option<Vector3<f64>>,
    pub binormal: Option<Vector3<f64>>,
    pub kappa: f64,
    pub tau: Option<f64>,
}

impl FrenetData {
    /// The full frame, or `InflectionPoint` when N and B are undefined.
    pub fn full(&self) -> Result<(Vector3<f64>, Vector3<f64>, Vector3<f64>, f64, f64)> {
        match (self.normal, self.binormal, self.tau) {
            (Some(n), Some(b), Some(tau)) => Ok((self.tangent, n, b, self.kappa, tau)),
            _ => Err(Error::InflectionPoint { t: self.t, kappa: self.kappa }),
        }
    }

    /// Frame matrix with rows T, N, B.
    pub fn matrix(&self) -> Result<Matrix3<f64>> {
        let (t, n, b, _, _) = self.full()?;
        Ok(Matrix3::from_rows(&[t.transpose(), n.transpose(), b.transpose()]))
    }

    /// Reverses N and B (and the sign of κ); torsion and det(T,N,B) are unchanged.
    pub fn flipped(mut self) -> Self {
        self.normal = self.normal.map(|n| -n);
        self.binormal = self.binormal.map(|b| -b);
        self.kappa = -self.kappa;
        self
    }
}

fn frenet_from_derivatives(t: f64, d1: Vector3<f64>, d2: Vector3<f64>, d3: Vector3<f64>) -> Result<FrenetData> {
    let v = d1.norm();
    if v < 1e-12 {
        return Err(Error::IrregularCurve { t, speed: v });
    }
    let tangent = d1 / v;
    let c = d1.cross(&d2);
    let kappa = c.norm() / (v * v * v);
    if kappa < INFLECTION_TOL {
        return Ok(FrenetData { t, tangent, normal: None, binormal: None, kappa, tau: None });
    }
    let binormal = c / c.norm();
    let normal = binormal.cross(&tangent);
    let tau = d1.dot(&d2.cross(&d3)) / c.norm_squared();
    Ok(FrenetData { t, tangent, normal: Some(normal), binormal: Some(binormal), kappa, tau: Some(tau) })
}

/// T, N, B, κ, τ at `t` from the first three derivatives.
pub fn frenet_apparatus(curve: &Curve3, t: f64) -> Result<FrenetData> {
    let d = curve.derivatives(t, 3)?;
    frenet_from_derivatives(t, d[1], d[2], d[3])
}

/// Frenet data at every parameter in `ts`, with N and B flipped where
/// needed so the frame field is continuous from sample to sample; κ then
/// carries the matching sign. Samples at inflections are skipped.
pub fn frenet_along(curve: &Curve3, ts: &[f64]) -> Result<Vec<FrenetData>> {
    let mut out: Vec<FrenetData> = Vec::with_capacity(ts.len());
    let mut prev: Option<Vector3<f64>> = None;
    for &t in ts {
        let mut f = frenet_apparatus(curve, t)?;
        let Some(n) = f.normal else { continue };
        if let Some(p) = prev {
            if p.dot(&n) < 0.0 {
                f = f.flipped();
            }
        }
        prev = f.normal;
        out.push(f);
    }
    Ok(out)
}

/// Sabban frame {γ, T, γ×T} of a unit-speed spherical curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SabbanData {
    pub t: f64,
    pub gamma: Vector3<f64>,
    pub tangent: Vector3<f64>,
    pub y: Vector3<f64>,
    pub kappa_g: f64,
}

pub fn sabban_frame(curve: &Curve3, s: f64) -> Result<SabbanData> {
    let d = curve.derivatives(s, 2)?;
    let norm = d[0].norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::NotSpherical { t: s, norm });
    }
    let speed = d[1].norm();
    if (speed - 1.0).abs() > 1e-6 {
        return Err(Error::NotUnitSpeed { t: s, speed });
    }
    let (gamma, tangent) = (d[0], d[1]);
    Ok(SabbanData { t: s, gamma, tangent, y: gamma.cross(&tangent), kappa_g: gamma.dot(&tangent.cross(&d[2])) })
}

/// Geodesic curvature of a spherical curve in any regular parametrization:
/// det(γ, γ', γ'')/‖γ'‖³.
pub fn geodesic_curvature(curve: &Curve3, t: f64) -> Result<f64> {
    let d = curve.derivatives(t, 2)?;
    let v = d[1].norm();
    Ok(d[0].dot(&d[1].cross(&d[2])) / (v * v * v))
}

/// One rung of the ψ hierarchy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiLevel {
    pub k: usize,
    /// ψ_k; absent for k = 0 on non-spherical curves.
    pub psi: Option<Vector3<f64>>,
    /// T_k = ψ_{k+1}.
    pub tangent: Vector3<f64>,
    /// N_k = ψ_{k+2}.
    pub normal: Vector3<f64>,
    /// B_k = T_k × N_k.
    pub binormal: Vector3<f64>,
    pub kappa: f64,
    pub tau: f64,
    /// Geodesic curvature of the normal indicatrix of level k; absent when κ_k = 0.
    pub sigma: Option<f64>,
    /// ds/dt of the base curve, the Jacobian between the curve parameter and arc length.
    pub speed: f64,
}

/// ψ₁ … ψ_count as jets (ψ_count keeps `keep` orders, earlier ones more),
/// together with the jet of γ'.
pub fn psi_jets(curve: &Curve3, count: usize, keep: usize, t: f64) -> Result<(Vec<VJet>, VJet)> {
    let g = curve.jet(t, count + keep)?;
    let d = g.derivative();
    let speed = d.norm();
    if speed.value() < curve.speed_floor() {
        return Err(Error::IrregularCurve { t, speed: speed.value() });
    }
    let mut out = vec![d * speed.recip()];
    for j in 1..count {
        let dp = out[j - 1].derivative();
        let n = dp.norm();
        if n.value() < INFLECTION_TOL * speed.value().max(1.0) {
            return Err(Error::DegenerateLevel { k: j, t });
        }
        out.push(dp * n.recip());
    }
    Ok((out, d))
}

/// Levels 0..=k_max of the ψ hierarchy at `t`.
pub fn psi_hierarchy(curve: &Curve3, k_max: usize, t: f64) -> Result<Vec<PsiLevel>> {
    let (psi, d) = psi_jets(curve, k_max + 2, 2, t)?;
    let v = d.norm();
    let gamma = curve.point(t)?;
    let mut out = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let p = &psi[k];
        let dp = p.derivative();
        let kappa = dp.norm() * v.recip();
        let tau = det3(p, &dp, &dp.derivative()) * (v * v * v * kappa * kappa).recip();
        let sigma = if kappa.value() > INFLECTION_TOL {
            let ratio = (tau * kappa.recip()).derivative() * v.recip();
            let (kv, tv) = (kappa.value(), tau.value());
            Some(kv * kv / (kv * kv + tv * tv).powf(1.5) * ratio.value())
        } else {
            None
        };
        let tangent = p.value();
        let normal = psi[k + 1].value();
        let psi_k = if k == 0 {
            curve.is_spherical().then_some(gamma)
        } else {
            Some(psi[k - 1].value())
        };
        out.push(PsiLevel {
            k,
            psi: psi_k,
            tangent,
            normal,
            binormal: tangent.cross(&normal),
            kappa: kappa.value(),
            tau: tau.value(),
            sigma,
            speed: v.value(),
        });
    }
    Ok(out)
}

/// The unit vector ψ_j at `t` (j ≥ 1).
pub fn psi_vector(curve: &Curve3, j: usize, t: f64) -> Result<Vector3<f64>> {
    let (psi, _) = psi_jets(curve, j, 0, t)?;
    Ok(psi[j - 1].value())
}

/// Centrode data of level k.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DarbouxData {
    pub k: usize,
    /// W_k = τ_k T_k + κ_k B_k.
    pub w: Vector3<f64>,
    /// A_k = W_k − Ω N_k when Ω is supplied.
    pub a: Option<Vector3<f64>>,
    pub omega: Option<f64>,
}

pub fn centrode(curve: &Curve3, k: usize, t: f64, omega: Option<f64>) -> Result<DarbouxData> {
    let lvl = psi_hierarchy(curve, k, t)?[k];
    let w = lvl.tangent * lvl.tau + lvl.binormal * lvl.kappa;
    Ok(DarbouxData { k, w, a: omega.map(|o| w - lvl.normal * o), omega })
}
