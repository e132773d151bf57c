//! Composite quadrature and prefix ("cumulative") integrals.
//!
//! A [`CumulativeIntegral`] tabulates `F(t_i) = ∫_{t_min}^{t_i} f` at evenly
//! spaced knots and fills in between either by a partial-panel rule on the
//! stored integrand, or by a Taylor expansion around the nearest knot when
//! the integrand's jets are available. The Taylor route is what keeps nested
//! operator chains cheap: evaluating level n never re-integrates level n−1.

use crate::error::{Error, Result};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

/// Closed parameter interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub min: f64,
    pub max: f64,
}

impl Interval {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::BadParams(format!("invalid interval [{min}, {max}]")));
        }
        Ok(Interval { min, max })
    }

    pub fn len(&self) -> f64 {
        self.max - self.min
    }

    pub fn contains(&self, t: f64) -> bool {
        let slack = 1e-12 * (1.0 + self.min.abs().max(self.max.abs()));
        t >= self.min - slack && t <= self.max + slack
    }

    pub fn check(&self, t: f64) -> Result<()> {
        if self.contains(t) && t.is_finite() {
            Ok(())
        } else {
            Err(Error::OutOfDomain { t, min: self.min, max: self.max })
        }
    }

    /// `n ≥ 2` evenly spaced points with both endpoints exact.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        assert!(n >= 2);
        let h = self.len() / (n - 1) as f64;
        let mut g: Vec<f64> = (0..n).map(|i| self.min + i as f64 * h).collect();
        g[n - 1] = self.max;
        g
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Simpson,
    GaussLegendre,
}

/// How prefix integrals are computed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub rule: Rule,
    /// Panels per unit parameter length.
    pub panels: usize,
    /// Richardson extrapolation between `panels` and `2·panels`.
    pub refinement: bool,
    /// Gauss–Legendre nodes per panel.
    pub nodes: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { rule: Rule::GaussLegendre, panels: 64, refinement: false, nodes: 8 }
    }
}

/// Smallest panel density accepted for operator chains.
pub const MIN_CHAIN_PANELS: usize = 16;

impl QuadratureConfig {
    pub fn simpson(panels: usize) -> Self {
        QuadratureConfig { rule: Rule::Simpson, panels, ..Default::default() }
    }

    pub fn gauss(panels: usize) -> Self {
        QuadratureConfig { rule: Rule::GaussLegendre, panels, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.panels == 0 {
            return Err(Error::InvalidConfig("panels must be positive".into()));
        }
        if self.rule == Rule::GaussLegendre && !(1..=64).contains(&self.nodes) {
            return Err(Error::InvalidConfig(format!("{} Gauss nodes per panel", self.nodes)));
        }
        Ok(())
    }

    pub fn validate_for_chain(&self) -> Result<()> {
        self.validate()?;
        if self.panels < MIN_CHAIN_PANELS {
            return Err(Error::InvalidConfig(format!(
                "chain construction needs at least {MIN_CHAIN_PANELS} panels per unit, got {}",
                self.panels
            )));
        }
        Ok(())
    }

    /// Algebraic order of the panel rule.
    pub fn order(&self) -> i32 {
        match self.rule {
            Rule::Simpson => 4,
            Rule::GaussLegendre => 2 * self.nodes as i32,
        }
    }

    fn panel_count(&self, domain: Interval) -> usize {
        ((self.panels as f64 * domain.len()).ceil() as usize).max(1)
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1].
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(m: usize) -> Self {
        assert!(m >= 1);
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        for i in 0..m.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(m, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(m, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[m - 1 - i] = x;
            weights[i] = w;
            weights[m - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// ∫_a^b f.
    pub fn integrate<V: Accumulate>(&self, a: f64, b: f64, f: &dyn Fn(f64) -> Result<V>) -> Result<V> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = V::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let t = mid + half * x;
            let v = f(t)?;
            if !v.finite() {
                return Err(Error::NonFiniteSample { t });
            }
            acc = acc + v * (w * half);
        }
        Ok(acc)
    }
}

/// P_m(x) and P_m'(x) by the three-term recurrence.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn simpson<V: Accumulate>(a: f64, b: f64, f: &dyn Fn(f64) -> Result<V>) -> Result<V> {
    let m = 0.5 * (a + b);
    let mut acc = V::zero();
    for (t, w) in [(a, 1.0), (m, 4.0), (b, 1.0)] {
        let v = f(t)?;
        if !v.finite() {
            return Err(Error::NonFiniteSample { t });
        }
        acc = acc + v * w;
    }
    Ok(acc * ((b - a) / 6.0))
}

/// Values that can be integrated: scalars and vectors in ℝ³.
pub trait Accumulate:
    Copy + Send + Sync + 'static + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn finite(&self) -> bool;
}

impl Accumulate for f64 {
    fn zero() -> Self {
        0.0
    }
    fn finite(&self) -> bool {
        self.is_finite()
    }
}

impl Accumulate for Vector3<f64> {
    fn zero() -> Self {
        Vector3::zeros()
    }
    fn finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

pub type Integrand<V> = Arc<dyn Fn(f64) -> Result<V> + Send + Sync>;

enum Interior<V: Accumulate> {
    /// Partial-panel rule on the stored integrand.
    Rule { f: Integrand<V>, gl: Arc<GaussLegendre>, rule: Rule },
    /// Taylor coefficients of the integrand at every knot, `stride` per knot.
    Taylor { coeffs: Vec<V>, stride: usize },
}

/// Tabulated prefix integral `F(t) = ∫_{t_min}^t f`.
pub struct CumulativeIntegral<V: Accumulate> {
    domain: Interval,
    h: f64,
    prefix: Vec<V>,
    interior: Interior<V>,
    /// Coarse table and weight `1/(2^p − 1)` for Richardson extrapolation.
    coarse: Option<(Box<CumulativeIntegral<V>>, f64)>,
}

impl<V: Accumulate> CumulativeIntegral<V> {
    /// Prefix integral of a plain function; interior points use a partial panel.
    pub fn new(domain: Interval, cfg: &QuadratureConfig, f: Integrand<V>) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.panel_count(domain);
        let build = |n: usize| -> Result<Self> {
            let gl = Arc::new(GaussLegendre::new(cfg.nodes));
            let prefix = prefix_table(domain, n, cfg, &gl, &*f)?;
            Ok(CumulativeIntegral {
                domain,
                h: domain.len() / n as f64,
                prefix,
                interior: Interior::Rule { f: f.clone(), gl, rule: cfg.rule },
                coarse: None,
            })
        };
        with_refinement(cfg, n, build)
    }

    /// Prefix integral of a function whose Taylor coefficients are available.
    ///
    /// `jet(t)` returns the integrand's coefficients `c_0..` at `t`; the table
    /// stores them at every knot and evaluates interior points by expanding
    /// around the nearest one.
    pub fn with_jets(
        domain: Interval,
        cfg: &QuadratureConfig,
        value: &(dyn Fn(f64) -> Result<V> + Sync),
        jet: &(dyn Fn(f64) -> Result<Vec<V>> + Sync),
    ) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.panel_count(domain);
        let build = |n: usize| -> Result<Self> {
            let gl = GaussLegendre::new(cfg.nodes);
            let prefix = prefix_table(domain, n, cfg, &gl, value)?;
            let h = domain.len() / n as f64;
            let mut coeffs = Vec::new();
            let mut stride = 0;
            for i in 0..=n {
                let t = if i == n { domain.max } else { domain.min + i as f64 * h };
                let c = jet(t)?;
                if c.iter().any(|v| !v.finite()) {
                    return Err(Error::NonFiniteSample { t });
                }
                if stride == 0 {
                    stride = c.len();
                }
                coeffs.extend(c.into_iter().take(stride));
            }
            Ok(CumulativeIntegral { domain, h, prefix, interior: Interior::Taylor { coeffs, stride }, coarse: None })
        };
        with_refinement(cfg, n, build)
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Knot parameters and the tabulated prefix values there.
    pub fn knots(&self) -> impl Iterator<Item = (f64, V)> + '_ {
        let n = self.prefix.len() - 1;
        self.prefix.iter().enumerate().map(move |(i, v)| {
            let t = if i == n { self.domain.max } else { self.domain.min + i as f64 * self.h };
            (t, *v)
        })
    }

    pub fn eval(&self, t: f64) -> Result<V> {
        self.domain.check(t)?;
        let fine = self.eval_unrefined(t)?;
        match &self.coarse {
            None => Ok(fine),
            Some((coarse, w)) => {
                let c = coarse.eval_unrefined(t)?;
                Ok(fine + (fine - c) * *w)
            }
        }
    }

    fn eval_unrefined(&self, t: f64) -> Result<V> {
        let n = self.prefix.len() - 1;
        let t = t.clamp(self.domain.min, self.domain.max);
        let j = (((t - self.domain.min) / self.h).round() as usize).min(n);
        let knot = if j == n { self.domain.max } else { self.domain.min + j as f64 * self.h };
        let delta = t - knot;
        if delta == 0.0 {
            return Ok(self.prefix[j]);
        }
        match &self.interior {
            Interior::Taylor { coeffs, stride } => {
                let c = &coeffs[j * stride..(j + 1) * stride];
                let mut acc = V::zero();
                for k in (0..*stride).rev() {
                    acc = acc * delta + c[k] * (1.0 / (k + 1) as f64);
                }
                Ok(self.prefix[j] + acc * delta)
            }
            Interior::Rule { f, gl, rule } => {
                let (a, b, sign) = if delta > 0.0 { (knot, t, 1.0) } else { (t, knot, -1.0) };
                let part = match rule {
                    Rule::GaussLegendre => gl.integrate(a, b, &**f)?,
                    Rule::Simpson => simpson(a, b, &**f)?,
                };
                Ok(self.prefix[j] + part * sign)
            }
        }
    }
}

fn with_refinement<V: Accumulate>(
    cfg: &QuadratureConfig,
    n: usize,
    build: impl Fn(usize) -> Result<CumulativeIntegral<V>>,
) -> Result<CumulativeIntegral<V>> {
    if !cfg.refinement {
        return build(n);
    }
    let mut fine = build(2 * n)?;
    let coarse = build(n)?;
    let w = 1.0 / (2f64.powi(cfg.order()) - 1.0);
    fine.coarse = Some((Box::new(coarse), w));
    Ok(fine)
}

fn prefix_table<V: Accumulate>(
    domain: Interval,
    n: usize,
    cfg: &QuadratureConfig,
    gl: &GaussLegendre,
    f: &(dyn Fn(f64) -> Result<V> + Sync),
) -> Result<Vec<V>> {
    use rayon::prelude::*;
    let h = domain.len() / n as f64;
    let panels: Vec<V> = (0..n)
        .into_par_iter()
        .map(|i| {
            let a = domain.min + i as f64 * h;
            let b = if i + 1 == n { domain.max } else { a + h };
            match cfg.rule {
                Rule::GaussLegendre => gl.integrate(a, b, f),
                Rule::Simpson => simpson(a, b, f),
            }
        })
        .collect::<Result<_>>()?;
    let mut prefix = Vec::with_capacity(n + 1);
    let mut acc = V::zero();
    prefix.push(acc);
    for p in panels {
        acc = acc + p;
        prefix.push(acc);
    }
    Ok(prefix)
}

/// `F(t) = ∫_{t_min}^t f` for a scalar function, with `F(t_min) = 0`.
pub fn cumulative_integral(
    f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    domain: Interval,
    cfg: &QuadratureConfig,
) -> Result<CumulativeIntegral<f64>> {
    CumulativeIntegral::new(domain, cfg, Arc::new(move |t| Ok(f(t))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_nodes_integrate_polynomials_exactly() {
        let gl = GaussLegendre::new(5);
        // degree 9 is the highest exact degree for 5 nodes
        let v: f64 = gl.integrate(0.0, 2.0, &|t| Ok(t.powi(9))).unwrap();
        assert_relative_eq!(v, 2f64.powi(10) / 10.0, max_relative = 1e-14);
        assert_relative_eq!(gl.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn cosine_quarter_period() {
        let d = Interval::new(0.0, std::f64::consts::PI).unwrap();
        let f = cumulative_integral(f64::cos, d, &QuadratureConfig::default()).unwrap();
        assert!((f.eval(std::f64::consts::FRAC_PI_2).unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(f.eval(0.0).unwrap(), 0.0);
    }

    #[test]
    fn zero_integrand_gives_zero() {
        let d = Interval::new(-1.0, 3.0).unwrap();
        let f = cumulative_integral(|_| 0.0, d, &QuadratureConfig::simpson(16)).unwrap();
        for t in d.grid(9) {
            assert_eq!(f.eval(t).unwrap(), 0.0);
        }
    }

    #[test]
    fn linear_antiderivative() {
        let d = Interval::new(0.0, 2.0).unwrap();
        let f = cumulative_integral(|_| 0.6 * 1.25, d, &QuadratureConfig::default()).unwrap();
        assert_relative_eq!(f.eval(1.0).unwrap(), 0.75, epsilon = 1e-14);
    }

    #[test]
    fn taylor_table_matches_rule_table() {
        let d = Interval::new(0.0, 3.0).unwrap();
        let cfg = QuadratureConfig::gauss(16);
        let value = |t: f64| Ok((2.0 * t).sin());
        let jet = |t: f64| {
            let j = (crate::jet::Jet::variable(t, 8) * 2.0).sin();
            Ok(j.coeffs().to_vec())
        };
        let tab = CumulativeIntegral::with_jets(d, &cfg, &value, &jet).unwrap();
        for t in d.grid(41) {
            let exact = (1.0 - (2.0 * t).cos()) / 2.0;
            assert!((tab.eval(t).unwrap() - exact).abs() < 1e-13, "t={t}");
        }
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let d = Interval::new(0.0, 1.0).unwrap();
        let r = cumulative_integral(|t| if t > 0.5 { f64::NAN } else { 1.0 }, d, &QuadratureConfig::default());
        assert!(matches!(r, Err(Error::NonFiniteSample { .. })));
    }

    #[test]
    fn out_of_domain() {
        let d = Interval::new(0.0, 1.0).unwrap();
        let f = cumulative_integral(|t| t, d, &QuadratureConfig::default()).unwrap();
        assert!(matches!(f.eval(1.5), Err(Error::OutOfDomain { .. })));
    }
}
