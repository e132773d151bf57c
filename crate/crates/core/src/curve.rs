//! Parametric space curves and the numerical substrate around them.

use crate::error::{Error, Result};
use crate::jet::{Jet, VJet, MAX_ORDER};
use crate::quadrature::{CumulativeIntegral, Interval, QuadratureConfig};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Default floor below which a curve counts as stopped.
pub const SPEED_FLOOR: f64 = 1e-8;

/// Jets of a moving frame written as `p' = σ·u` with `u` a smooth unit field.
///
/// For a curve on the sphere `p` is the point itself; for the tangent
/// indicatrix of a space curve `p = T`, `σ` is the signed curvature (times
/// the parameter speed) and `u = N`. Keeping `σ` signed is what lets
/// operator chains pass smoothly through cusps and inflections.
#[derive(Clone, Copy, Debug)]
pub struct SphereJet {
    pub point: VJet,
    pub speed: Jet,
    pub dir: VJet,
}

/// Evaluates a curve as Taylor jets in its parameter.
pub trait CurveEval: Send + Sync {
    fn jet(&self, t: f64, order: usize) -> Result<VJet>;

    /// Smooth `(γ, σ, u)` for curves that carry one (images of the I operator).
    fn sphere_frame(&self, _t: f64, _order: usize) -> Option<Result<SphereJet>> {
        None
    }

    /// Smooth `(T, σ, N)` for curves that carry one (images of the J operator).
    fn tangent_frame(&self, _t: f64, _order: usize) -> Option<Result<SphereJet>> {
        None
    }
}

/// Finite-difference settings for curves without analytic derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FdConfig {
    /// Step as a fraction of the domain length.
    pub rel_step: f64,
    /// Step multiplier for second derivatives.
    pub second_order_scale: f64,
    /// Step multiplier for third and fourth derivatives.
    pub high_order_scale: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig { rel_step: 1e-4, second_order_scale: 4.0, high_order_scale: 8.0 }
    }
}

impl FdConfig {
    /// Step multiplier for the derivative of order `m`.
    pub fn scale(&self, m: usize) -> f64 {
        match m {
            0 | 1 => 1.0,
            2 => self.second_order_scale,
            _ => self.high_order_scale,
        }
    }
}

/// A parameter where the curve (or its frame) degenerates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Singularity {
    pub t: f64,
    /// Half-width of the neighbourhood where the speed stays below the floor.
    pub half_width: f64,
}

/// A parametric curve in ℝ³ over a closed interval.
#[derive(Clone)]
pub struct Curve3 {
    domain: Interval,
    max_order: usize,
    eval: Arc<dyn CurveEval>,
    singular: Vec<Singularity>,
    speed_floor: f64,
    spherical: bool,
    fd: FdConfig,
}

impl fmt::Debug for Curve3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Curve3")
            .field("domain", &self.domain)
            .field("max_order", &self.max_order)
            .field("spherical", &self.spherical)
            .field("singular", &self.singular)
            .finish()
    }
}

struct AnalyticEval<F>(F);

impl<F: Fn(Jet) -> VJet + Send + Sync> CurveEval for AnalyticEval<F> {
    fn jet(&self, t: f64, order: usize) -> Result<VJet> {
        Ok((self.0)(Jet::variable(t, order)))
    }
}

struct PointEval<F>(F);

impl<F: Fn(f64) -> Vector3<f64> + Send + Sync> CurveEval for PointEval<F> {
    fn jet(&self, t: f64, order: usize) -> Result<VJet> {
        if order > 0 {
            return Err(Error::OrderUnavailable { order, t });
        }
        Ok(VJet::constant((self.0)(t), 0))
    }
}

impl Curve3 {
    pub fn from_eval(domain: Interval, max_order: usize, eval: Arc<dyn CurveEval>) -> Self {
        Curve3 {
            domain,
            max_order: max_order.min(MAX_ORDER),
            eval,
            singular: Vec::new(),
            speed_floor: SPEED_FLOOR,
            spherical: false,
            fd: FdConfig::default(),
        }
    }

    /// A curve given as a function of a jet parameter; derivatives of every order are exact.
    ///
    /// ```
    /// use kslant::{Curve3, Interval};
    /// use kslant::jet::VJet;
    /// let helix = Curve3::analytic(Interval::new(0.0, 6.0).unwrap(), |s| {
    ///     let (sn, cs) = s.sin_cos();
    ///     VJet::new(cs * 0.6, sn * 0.6, s * 0.8)
    /// });
    /// let d = helix.derivatives(0.0, 2).unwrap();
    /// assert!((d[2].x + 0.6).abs() < 1e-15);
    /// ```
    pub fn analytic(domain: Interval, f: impl Fn(Jet) -> VJet + Send + Sync + 'static) -> Self {
        Curve3::from_eval(domain, MAX_ORDER, Arc::new(AnalyticEval(f)))
    }

    /// A curve known only through point evaluation; derivatives use finite differences.
    pub fn from_fn(domain: Interval, f: impl Fn(f64) -> Vector3<f64> + Send + Sync + 'static) -> Self {
        Curve3::from_eval(domain, 0, Arc::new(PointEval(f)))
    }

    /// Restricts or extends the parameter interval; the evaluator must be defined on it.
    pub fn with_domain(mut self, domain: Interval) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_spherical(mut self, spherical: bool) -> Self {
        self.spherical = spherical;
        self
    }

    pub fn with_singular(mut self, mut singular: Vec<Singularity>) -> Self {
        singular.sort_by(|a, b| a.t.total_cmp(&b.t));
        self.singular = singular;
        self
    }

    pub fn with_speed_floor(mut self, floor: f64) -> Self {
        self.speed_floor = floor;
        self
    }

    pub fn with_fd(mut self, fd: FdConfig) -> Self {
        self.fd = fd;
        self
    }

    /// The same point map with analytic derivatives hidden, so every
    /// derivative goes through the finite-difference path.
    pub fn sampled_only(&self) -> Curve3 {
        let inner = self.eval.clone();
        let mut c = Curve3::from_eval(self.domain, 0, Arc::new(ValueOnly(inner)));
        c.singular = self.singular.clone();
        c.spherical = self.spherical;
        c.speed_floor = self.speed_floor;
        c.fd = self.fd;
        c
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn is_spherical(&self) -> bool {
        self.spherical
    }

    pub fn speed_floor(&self) -> f64 {
        self.speed_floor
    }

    pub fn fd_config(&self) -> FdConfig {
        self.fd
    }

    pub fn singularities(&self) -> &[Singularity] {
        &self.singular
    }

    pub fn singular_points(&self) -> Vec<f64> {
        self.singular.iter().map(|s| s.t).collect()
    }

    /// Subintervals of the domain where the speed stays above the floor.
    pub fn regularity_mask(&self) -> Vec<Interval> {
        let mut out = Vec::new();
        let mut start = self.domain.min;
        for s in &self.singular {
            let end = s.t - s.half_width;
            if end > start {
                out.push(Interval { min: start, max: end });
            }
            start = start.max(s.t + s.half_width);
        }
        if start < self.domain.max {
            out.push(Interval { min: start, max: self.domain.max });
        }
        out
    }

    pub fn point(&self, t: f64) -> Result<Vector3<f64>> {
        self.domain.check(t)?;
        Ok(self.eval.jet(t, 0)?.value())
    }

    /// Taylor jet of the curve at `t`, analytic when available, otherwise
    /// built from finite differences (order ≤ 4).
    pub fn jet(&self, t: f64, order: usize) -> Result<VJet> {
        self.domain.check(t)?;
        if order <= self.max_order {
            return self.eval.jet(t, order);
        }
        if self.max_order > 0 || order > 4 {
            return Err(Error::OrderUnavailable { order, t });
        }
        Ok(VJet::from_derivatives(&self.fd_derivatives(t, order)?))
    }

    /// `[γ(t), γ'(t), ..., γ^(order)(t)]`.
    pub fn derivatives(&self, t: f64, order: usize) -> Result<Vec<Vector3<f64>>> {
        Ok(self.jet(t, order)?.derivatives())
    }

    fn fd_derivatives(&self, t: f64, order: usize) -> Result<Vec<Vector3<f64>>> {
        let base = self.domain.len() * self.fd.rel_step;
        let f = |x: f64| -> Result<Vector3<f64>> { Ok(self.eval.jet(x, 0)?.value()) };
        let f0 = f(t)?;
        let mut out = vec![f0];
        for m in 1..=order {
            let h = base * self.fd.scale(m);
            let (radius, w, denom): (i32, &[f64], f64) = match m {
                1 => (2, &[1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0], h),
                2 => (2, &[-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0], h * h),
                3 => (3, &[0.125, -1.0, 1.625, 0.0, -1.625, 1.0, -0.125], h * h * h),
                _ => (
                    3,
                    &[-1.0 / 6.0, 2.0, -6.5, 28.0 / 3.0, -6.5, 2.0, -1.0 / 6.0],
                    h * h * h * h,
                ),
            };
            let reach = radius as f64 * h;
            if t - reach < self.domain.min || t + reach > self.domain.max {
                return Err(Error::OrderUnavailable { order: m, t });
            }
            let mut acc = Vector3::zeros();
            for (i, wi) in w.iter().enumerate() {
                let k = i as i32 - radius;
                if *wi != 0.0 {
                    let x = if k == 0 { f0 } else { f(t + k as f64 * h)? };
                    acc += x * *wi;
                }
            }
            out.push(acc / denom);
        }
        Ok(out)
    }

    /// Distance from `t` to the domain boundary needed by the finite-difference stencils.
    pub fn fd_margin(&self, order: usize) -> f64 {
        if order <= self.max_order {
            return 0.0;
        }
        let base = self.domain.len() * self.fd.rel_step;
        (1..=order.min(4)).map(|m| if m >= 3 { 3.0 } else { 2.0 } * base * self.fd.scale(m)).fold(0.0, f64::max)
    }

    pub fn speed(&self, t: f64) -> Result<f64> {
        Ok(self.derivatives(t, 1)?[1].norm())
    }

    /// Smooth `(γ, σ, u)` with `γ' = σu`; for plain curves `σ = ‖γ'‖`.
    pub fn sphere_frame(&self, t: f64, order: usize) -> Result<SphereJet> {
        self.domain.check(t)?;
        if let Some(r) = self.eval.sphere_frame(t, order) {
            return r;
        }
        let g = self.jet(t, order + 1)?;
        let d = g.derivative();
        let speed = d.norm();
        if speed.value() < self.speed_floor {
            return Err(Error::IrregularCurve { t, speed: speed.value() });
        }
        Ok(SphereJet { point: g.truncate(order), speed, dir: d * speed.recip() })
    }

    /// Smooth `(T, σ, N)` with `T' = σN`; for plain curves `σ = ‖T'‖ ≥ 0`.
    pub fn tangent_frame(&self, t: f64, order: usize) -> Result<SphereJet> {
        self.domain.check(t)?;
        if let Some(r) = self.eval.tangent_frame(t, order) {
            return r;
        }
        let g = self.jet(t, order + 2)?;
        let d = g.derivative();
        let v = d.norm();
        if v.value() < self.speed_floor {
            return Err(Error::IrregularCurve { t, speed: v.value() });
        }
        let tangent = d * v.recip();
        let dt = tangent.derivative();
        let k = dt.norm();
        if k.value() < 1e-10 {
            return Err(Error::InflectionPoint { t, kappa: k.value() });
        }
        Ok(SphereJet { point: tangent.truncate(order), speed: k, dir: dt * k.recip() })
    }

    /// Oriented unit tangent: the carried direction field when the curve has
    /// one, otherwise `γ'/‖γ'‖`.
    pub fn unit_tangent(&self, t: f64, order: usize) -> Result<VJet> {
        if let Some(r) = self.eval.sphere_frame(t, order) {
            return Ok(r?.dir);
        }
        if let Some(r) = self.eval.tangent_frame(t, order) {
            return Ok(r?.point);
        }
        let g = self.jet(t, order + 1)?;
        let d = g.derivative();
        let v = d.norm();
        if v.value() < self.speed_floor {
            return Err(Error::IrregularCurve { t, speed: v.value() });
        }
        Ok(d * v.recip())
    }

    /// Evaluator handle, for wrappers that build derived curves.
    pub fn evaluator(&self) -> Arc<dyn CurveEval> {
        self.eval.clone()
    }
}

struct ValueOnly(Arc<dyn CurveEval>);

impl CurveEval for ValueOnly {
    fn jet(&self, t: f64, order: usize) -> Result<VJet> {
        if order > 0 {
            return Err(Error::OrderUnavailable { order, t });
        }
        Ok(self.0.jet(t, 0)?.truncate(0))
    }
}

/// `[γ(t), γ'(t), ..., γ^(order)(t)]`; finite differences when `order`
/// exceeds the analytic order.
pub fn eval_derivatives(curve: &Curve3, t: f64, order: usize) -> Result<Vec<Vector3<f64>>> {
    curve.derivatives(t, order)
}

struct ArcLengthEval {
    src: Curve3,
    length: Arc<CumulativeIntegral<f64>>,
    knots: Vec<(f64, f64)>,
    total: f64,
}

impl ArcLengthEval {
    /// The source parameter `t` with arc length `s` from the start.
    fn invert(&self, s: f64) -> Result<f64> {
        let s = s.clamp(0.0, self.total);
        let i = self.knots.partition_point(|(_, v)| *v <= s).clamp(1, self.knots.len() - 1);
        let (mut lo, mut hi) = (self.knots[i - 1].0, self.knots[i].0);
        let (s_lo, s_hi) = (self.knots[i - 1].1, self.knots[i].1);
        let mut t = lo + (hi - lo) * ((s - s_lo) / (s_hi - s_lo)).clamp(0.0, 1.0);
        for _ in 0..60 {
            let r = self.length.eval(t)? - s;
            if r > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let v = self.src.speed(t)?;
            let mut next = t - r / v;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= 1e-15 * (1.0 + t.abs()) {
                return Ok(next);
            }
            t = next;
        }
        Ok(t)
    }
}

impl CurveEval for ArcLengthEval {
    fn jet(&self, s: f64, order: usize) -> Result<VJet> {
        let t0 = self.invert(s)?;
        if order == 0 {
            return Ok(self.src.jet(t0, 0)?.truncate(0));
        }
        let g = self.src.jet(t0, order + 1)?;
        let speed = g.derivative().norm();
        // dt/ds = 1/‖γ'(t)‖, solved order by order as a Taylor series in s.
        let mut coeffs = vec![t0];
        for m in 0..order {
            let inner = Jet::from_coeffs(&coeffs);
            let v = speed.truncate(m).compose(&inner);
            coeffs.push(v.recip().coeff(m) / (m + 1) as f64);
        }
        let tjet = Jet::from_coeffs(&coeffs);
        Ok(g.truncate(order).compose(&tjet))
    }
}

/// Reparametrizes a regular curve by arc length, starting at `s = 0`.
pub fn arc_length_reparametrize(curve: &Curve3, cfg: &QuadratureConfig) -> Result<Curve3> {
    let d = curve.domain();
    let probe = d.grid(257);
    for &t in &probe {
        let v = curve.speed(t.clamp(d.min + curve.fd_margin(1), d.max - curve.fd_margin(1)))?;
        if v < curve.speed_floor() {
            return Err(Error::IrregularCurve { t, speed: v });
        }
    }
    let length = if curve.max_order() >= 2 {
        let c = curve.clone();
        let c2 = curve.clone();
        let k = curve.max_order().min(11);
        CumulativeIntegral::with_jets(
            d,
            cfg,
            &move |t| c.speed(t),
            &move |t| Ok(c2.jet(t, k)?.derivative().norm().coeffs().to_vec()),
        )?
    } else {
        let c = curve.clone();
        let margin = curve.fd_margin(1);
        CumulativeIntegral::new(
            d,
            cfg,
            Arc::new(move |t: f64| c.speed(t.clamp(d.min + margin, d.max - margin))),
        )?
    };
    let knots: Vec<(f64, f64)> = length.knots().collect();
    let total = knots.last().map(|k| k.1).unwrap_or(0.0);
    let max_order = curve.max_order().saturating_sub(1);
    let eval = ArcLengthEval { src: curve.clone(), length: Arc::new(length), knots, total };
    let new_domain = Interval::new(0.0, total)?;
    let singular = curve
        .singularities()
        .iter()
        .filter_map(|s| eval.length.eval(s.t).ok().map(|v| Singularity { t: v, half_width: s.half_width }))
        .collect();
    Ok(Curve3::from_eval(new_domain, max_order, Arc::new(eval))
        .with_spherical(curve.is_spherical())
        .with_singular(singular)
        .with_fd(curve.fd_config()))
}

/// How a sampled curve was produced.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CurveMeta {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operator: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    pub theta: Vec<f64>,
    /// Name of the parameter column, `t` or `s`.
    pub parameter: String,
    pub spherical: bool,
    /// Parameters where the curve or its frame degenerates.
    pub singular: Vec<f64>,
    pub params: BTreeMap<String, f64>,
}

impl CurveMeta {
    pub fn named(name: &str) -> Self {
        CurveMeta { name: Some(name.to_string()), parameter: "t".into(), ..Default::default() }
    }
}

/// A curve as a table of samples on a strictly increasing grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledCurve {
    pub meta: CurveMeta,
    pub grid: Vec<f64>,
    pub points: Vec<[f64; 3]>,
}

impl SampledCurve {
    pub fn new(meta: CurveMeta, grid: Vec<f64>, points: Vec<[f64; 3]>) -> Result<Self> {
        let c = SampledCurve { meta, grid, points };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.len() != self.points.len() {
            return Err(Error::Format(format!(
                "{} grid values but {} points",
                self.grid.len(),
                self.points.len()
            )));
        }
        if self.grid.len() < 2 {
            return Err(Error::Format("a sampled curve needs at least two samples".into()));
        }
        if self.grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Format("grid is not strictly increasing".into()));
        }
        if self.grid.iter().chain(self.points.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::Format("non-finite sample".into()));
        }
        Ok(())
    }

    pub fn point(&self, i: usize) -> Vector3<f64> {
        Vector3::from(self.points[i])
    }

    /// Piecewise polynomial interpolant through the samples (degree up to 9,
    /// nearest-node stencils); its derivatives are exact derivatives of the
    /// interpolant.
    pub fn to_curve(&self) -> Result<Curve3> {
        self.validate()?;
        let domain = Interval::new(self.grid[0], *self.grid.last().unwrap())?;
        let degree = (self.grid.len() - 1).min(9);
        let eval = Interpolant { grid: self.grid.clone(), points: self.points.clone(), degree };
        let singular =
            self.meta.singular.iter().map(|&t| Singularity { t, half_width: 0.0 }).collect();
        Ok(Curve3::from_eval(domain, degree.min(6), Arc::new(eval))
            .with_spherical(self.meta.spherical)
            .with_singular(singular))
    }
}

struct Interpolant {
    grid: Vec<f64>,
    points: Vec<[f64; 3]>,
    degree: usize,
}

impl CurveEval for Interpolant {
    fn jet(&self, t: f64, order: usize) -> Result<VJet> {
        let n = self.grid.len();
        let m = self.degree + 1;
        let i = self.grid.partition_point(|&g| g <= t).saturating_sub(1);
        let start = i.saturating_sub((m - 1) / 2).min(n - m);
        let xs = &self.grid[start..start + m];
        // Newton divided differences, then Horner in the jet variable around t.
        let mut dd: Vec<Vector3<f64>> = self.points[start..start + m].iter().map(|p| Vector3::from(*p)).collect();
        for level in 1..m {
            for j in (level..m).rev() {
                dd[j] = (dd[j] - dd[j - 1]) / (xs[j] - xs[j - level]);
            }
        }
        let order = order.min(self.degree);
        let mut acc = VJet::constant(dd[m - 1], order);
        for j in (0..m - 1).rev() {
            let factor = Jet::variable(t - xs[j], order);
            acc = acc * factor + dd[j];
        }
        Ok(acc)
    }
}

/// Samples the curve on `n ≥ 2` uniform parameter values.
pub fn resample(curve: &Curve3, n: usize, meta: CurveMeta) -> Result<SampledCurve> {
    use rayon::prelude::*;
    if n < 2 {
        return Err(Error::BadParams(format!("resample needs n >= 2, got {n}")));
    }
    let grid = curve.domain().grid(n);
    let points = grid
        .par_iter()
        .map(|&t| curve.point(t).map(|p| [p.x, p.y, p.z]))
        .collect::<Result<Vec<_>>>()?;
    let mut meta = meta;
    if meta.parameter.is_empty() {
        meta.parameter = "t".into();
    }
    meta.spherical = meta.spherical || curve.is_spherical();
    if meta.singular.is_empty() {
        meta.singular = curve.singular_points();
    }
    SampledCurve::new(meta, grid, points)
}
