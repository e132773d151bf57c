//! The constructive operators.
//!
//! `I` maps a spherical curve γ to the spherical curve α with α' = S·γ,
//! where S = ‖γ'‖ cos θ and θ' = det(γ, γ', γ'')/‖γ'‖². In frame form
//! α = −cos θ·u + sin θ·(γ × u) with u = γ'/‖γ'‖, so α stays on the sphere
//! by construction.
//!
//! `J` is the same construction applied to the tangent indicatrix of a
//! unit-speed curve: the new tangent is −cos θ·N + sin θ·B with θ' = τ, and
//! the curve itself is its integral. Both raise the slant order by one.
//!
//! Each level keeps its moving frame in the form p' = σ·u with a *signed*
//! speed σ. Where σ crosses zero the next level has a cusp (I) or an
//! inflection (J); the signed form continues smoothly through it, and the
//! parameter is recorded as a singularity of the level.

use crate::curve::{Curve3, CurveEval, Singularity, SphereJet};
use crate::error::{Error, Result};
use crate::frames::frenet_apparatus;
use crate::jet::{det3, Jet, VJet};
use crate::quadrature::{CumulativeIntegral, Interval, QuadratureConfig};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Default maximum chain depth.
pub const DEPTH_LIMIT: usize = 4;

/// Taylor order of the integrand tables behind θ and β.
const TABLE_ORDER: usize = 9;

/// Sphericity tolerance for operator inputs.
const SPHERE_TOL: f64 = 1e-6;

/// Chain tolerance budget at a given level: 10⁻⁸·4^level.
pub fn tol_chain(level: usize) -> f64 {
    1e-8 * 4f64.powi(level as i32)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Operator {
    I,
    J,
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operator::I => "I",
            Operator::J => "J",
        })
    }
}

/// Phases θ₀, θ₁, … used at successive levels of a chain.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseVector {
    pub thetas: Vec<f64>,
}

impl PhaseVector {
    pub fn new(thetas: Vec<f64>) -> Self {
        PhaseVector { thetas }
    }

    pub fn zeros(n: usize) -> Self {
        PhaseVector { thetas: vec![0.0; n] }
    }
}

/// A shareable scalar function of the curve parameter.
#[derive(Clone)]
pub struct ScalarFn(Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>);

impl ScalarFn {
    pub fn new(f: impl Fn(f64) -> Result<f64> + Send + Sync + 'static) -> Self {
        ScalarFn(Arc::new(f))
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        (self.0)(t)
    }
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ScalarFn")
    }
}

/// One rung of an I or J chain.
#[derive(Clone, Debug)]
pub struct ChainLevel {
    pub level: usize,
    pub operator: Operator,
    pub curve: Curve3,
    /// θ used to build this level from its parent (absent at the seed).
    pub theta_fn: Option<ScalarFn>,
    /// S(t) = σ_parent(t)·cos θ(t), the signed speed of this level's frame point.
    pub weight_fn: Option<ScalarFn>,
    pub parent: Option<Curve3>,
    /// θ at the start of the domain.
    pub phase: Option<f64>,
}

impl ChainLevel {
    pub fn seed(curve: Curve3, operator: Operator) -> Self {
        ChainLevel { level: 0, operator, curve, theta_fn: None, weight_fn: None, parent: None, phase: None }
    }
}

/// Predicted curvature and torsion of a J image.
#[derive(Clone, Debug)]
pub struct CurvaturePair {
    pub kappa_bar: ScalarFn,
    pub tau_bar: ScalarFn,
}

/// Chain construction limits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainOptions {
    pub depth_limit: usize,
    /// Require circle seeds for I chains and planar seeds for J chains.
    pub strict_seed: bool,
}

impl Default for ChainOptions {
    fn default() -> Self {
        ChainOptions { depth_limit: DEPTH_LIMIT, strict_seed: true }
    }
}

fn carries_sphere_frame(c: &Curve3) -> bool {
    c.evaluator().sphere_frame(c.domain().min, 0).is_some()
}

fn carries_tangent_frame(c: &Curve3) -> bool {
    c.evaluator().tangent_frame(c.domain().min, 0).is_some()
}

/// Highest order at which `sphere_frame` is analytic.
fn sphere_order(c: &Curve3) -> usize {
    if carries_sphere_frame(c) {
        c.max_order()
    } else {
        c.max_order().saturating_sub(1)
    }
}

/// Highest order at which `tangent_frame` is analytic.
fn tangent_order(c: &Curve3) -> usize {
    if carries_tangent_frame(c) {
        c.max_order().saturating_sub(1)
    } else {
        c.max_order().saturating_sub(2)
    }
}

/// Which moving frame of the parent the operator consumes.
#[derive(Clone, Copy, PartialEq, Eq)]
enum FrameKind {
    Sphere,
    Tangent,
}

fn parent_frame(parent: &Curve3, kind: FrameKind, t: f64, order: usize) -> Result<SphereJet> {
    match kind {
        FrameKind::Sphere => parent.sphere_frame(t, order),
        FrameKind::Tangent => parent.tangent_frame(t, order),
    }
}

/// θ(t) = θ₀ + ∫ det(p, u, u') over the parent frame.
struct Theta {
    table: CumulativeIntegral<f64>,
    theta0: f64,
}

impl Theta {
    fn build(parent: &Curve3, kind: FrameKind, theta0: f64, cfg: &QuadratureConfig) -> Result<Self> {
        let domain = parent.domain();
        let available = match kind {
            FrameKind::Sphere => sphere_order(parent),
            FrameKind::Tangent => tangent_order(parent),
        };
        let integrand = |f: &SphereJet| det3(&f.point, &f.dir, &f.dir.derivative());
        let table = if available >= 2 {
            let order = available.min(TABLE_ORDER + 1);
            let p = parent.clone();
            let p2 = parent.clone();
            CumulativeIntegral::with_jets(
                domain,
                cfg,
                &move |t| Ok(integrand(&parent_frame(&p, kind, t, 1)?).value()),
                &move |t| Ok(integrand(&parent_frame(&p2, kind, t, order)?).coeffs().to_vec()),
            )?
        } else {
            let p = parent.clone();
            let margin = p.fd_margin(3);
            CumulativeIntegral::new(
                domain,
                cfg,
                Arc::new(move |t: f64| {
                    let t = t.clamp(domain.min + margin, domain.max - margin);
                    Ok(integrand(&parent_frame(&p, kind, t, 1)?).value())
                }),
            )?
        };
        Ok(Theta { table, theta0 })
    }

    fn value(&self, t: f64) -> Result<f64> {
        Ok(self.theta0 + self.table.eval(t)?)
    }

    /// Jet of θ given the parent frame at `t` (of at least `order`).
    fn jet(&self, t: f64, order: usize, frame: &SphereJet) -> Result<Jet> {
        let v = self.value(t)?;
        if order == 0 {
            return Ok(Jet::constant(v, 0));
        }
        let g = det3(&frame.point, &frame.dir, &frame.dir.derivative());
        Ok(g.truncate(order - 1).integral(v))
    }
}

/// The frame step shared by both operators: p̄ = −cos θ·u + sin θ·(p × u),
/// σ̄ = σ cos θ, ū = p.
fn step(frame: &SphereJet, theta: &Jet) -> SphereJet {
    let (s, c) = theta.sin_cos();
    let point = -(frame.dir * c) + frame.point.cross(&frame.dir) * s;
    SphereJet { point, speed: frame.speed * c, dir: frame.point }
}

struct ILevel {
    parent: Curve3,
    theta: Arc<Theta>,
}

impl ILevel {
    fn frame(&self, t: f64, order: usize) -> Result<SphereJet> {
        let f = self.parent.sphere_frame(t, order)?;
        let th = self.theta.jet(t, order, &f)?;
        Ok(step(&f, &th))
    }
}

impl CurveEval for ILevel {
    fn jet(&self, t: f64, order: usize) -> Result<VJet> {
        Ok(self.frame(t, order)?.point)
    }

    fn sphere_frame(&self, t: f64, order: usize) -> Option<Result<SphereJet>> {
        Some(self.frame(t, order))
    }
}

struct JLevel {
    parent: Curve3,
    theta: Arc<Theta>,
    position: Arc<CumulativeIntegral<Vector3<f64>>>,
}

impl JLevel {
    fn frame(&self, t: f64, order: usize) -> Result<SphereJet> {
        let f = self.parent.tangent_frame(t, order)?;
        let th = self.theta.jet(t, order, &f)?;
        Ok(step(&f, &th))
    }
}

impl CurveEval for JLevel {
    fn jet(&self, t: f64, order: usize) -> Result<VJet> {
        let p = self.position.eval(t)?;
        if order == 0 {
            return Ok(VJet::constant(p, 0));
        }
        Ok(self.frame(t, order - 1)?.point.integral(p))
    }

    fn tangent_frame(&self, t: f64, order: usize) -> Option<Result<SphereJet>> {
        Some(self.frame(t, order))
    }
}

/// Parameters where cos θ changes sign, i.e. where σ̄ = σ cos θ vanishes
/// on top of the parent's own zeros.
fn sign_changes_of_cos(theta: &Theta, derivative: impl Fn(f64) -> Result<f64>) -> Result<Vec<f64>> {
    let knots: Vec<(f64, f64)> = theta.table.knots().map(|(t, v)| (t, (v + theta.theta0).cos())).collect();
    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let ((a, fa), (b, fb)) = (w[0], w[1]);
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fa * fb >= 0.0 {
            continue;
        }
        let (mut lo, mut hi) = (a, b);
        let mut flo = fa;
        let mut t = 0.5 * (a + b);
        for _ in 0..80 {
            let th = theta.value(t)?;
            let f = th.cos();
            if f == 0.0 {
                break;
            }
            if (f < 0.0) == (flo < 0.0) {
                lo = t;
                flo = f;
            } else {
                hi = t;
            }
            let df = -th.sin() * derivative(t)?;
            let mut next = if df != 0.0 { t - f / df } else { 0.5 * (lo + hi) };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() < 1e-15 * (1.0 + t.abs()) {
                t = next;
                break;
            }
            t = next;
        }
        roots.push(t);
    }
    Ok(roots)
}

fn singularities(
    parent: &Curve3,
    theta: &Theta,
    frame_speed: impl Fn(f64) -> Result<f64>,
    theta_rate: impl Fn(f64) -> Result<f64>,
    floor: f64,
) -> Result<Vec<Singularity>> {
    let mut out: Vec<Singularity> = parent.singularities().to_vec();
    for t in sign_changes_of_cos(theta, &theta_rate)? {
        // σ̄' = −σ sin θ θ' at a zero of cos θ
        let slope = (frame_speed(t)? * theta_rate(t)?).abs();
        let half_width = if slope > 0.0 { (floor / slope).min(1e-3) } else { 1e-3 };
        if !out.iter().any(|s| (s.t - t).abs() < 1e-12) {
            out.push(Singularity { t, half_width });
        }
    }
    out.sort_by(|a, b| a.t.total_cmp(&b.t));
    Ok(out)
}

fn check_spherical_input(curve: &Curve3) -> Result<()> {
    for t in curve.domain().grid(65) {
        let norm = curve.point(t)?.norm();
        if (norm - 1.0).abs() > SPHERE_TOL {
            return Err(Error::NotSpherical { t, norm });
        }
    }
    Ok(())
}

fn check_unit_speed_input(curve: &Curve3) -> Result<()> {
    let d = curve.domain();
    let m = curve.fd_margin(1);
    for t in (Interval { min: d.min + m, max: d.max - m }).grid(65) {
        let speed = curve.unit_tangent(t, 0).and_then(|_| curve.speed(t))?;
        if (speed - 1.0).abs() > SPHERE_TOL {
            return Err(Error::NotUnitSpeed { t, speed });
        }
    }
    Ok(())
}

/// θ(t) and the weight S(t) = ‖γ'(t)‖ cos θ(t) of a spherical curve.
pub fn s_gamma(curve: &Curve3, theta0: f64, cfg: &QuadratureConfig) -> Result<(ScalarFn, ScalarFn)> {
    let level = apply_i(curve, theta0, cfg)?;
    Ok((level.theta_fn.unwrap(), level.weight_fn.unwrap()))
}

/// One application of the I operator, in frame form.
pub fn apply_i(curve: &Curve3, theta0: f64, cfg: &QuadratureConfig) -> Result<ChainLevel> {
    cfg.validate()?;
    check_spherical_input(curve)?;
    if !carries_sphere_frame(curve) {
        for t in curve.domain().grid(65) {
            let t = t.clamp(curve.domain().min + curve.fd_margin(1), curve.domain().max - curve.fd_margin(1));
            let v = curve.speed(t)?;
            if v < curve.speed_floor() {
                return Err(Error::IrregularCurve { t, speed: v });
            }
        }
    }
    let theta = Arc::new(Theta::build(curve, FrameKind::Sphere, theta0, cfg)?);
    let eval = Arc::new(ILevel { parent: curve.clone(), theta: theta.clone() });
    let e2 = eval.clone();
    let sing = singularities(
        curve,
        &theta,
        |t| Ok(curve.sphere_frame(t, 0)?.speed.value()),
        |t| theta_rate(curve, FrameKind::Sphere, t),
        curve.speed_floor(),
    )?;
    let out = Curve3::from_eval(curve.domain(), sphere_order(curve), eval)
        .with_spherical(true)
        .with_singular(sing)
        .with_fd(curve.fd_config());
    let th = theta.clone();
    Ok(ChainLevel {
        level: 1,
        operator: Operator::I,
        curve: out,
        theta_fn: Some(ScalarFn::new(move |t| th.value(t))),
        weight_fn: Some(ScalarFn::new(move |t| Ok(e2.frame(t, 0)?.speed.value()))),
        parent: Some(curve.clone()),
        phase: Some(theta0),
    })
}

fn theta_rate(parent: &Curve3, kind: FrameKind, t: f64) -> Result<f64> {
    let f = parent_frame(parent, kind, t, 1)?;
    Ok(det3(&f.point, &f.dir, &f.dir.derivative()).value())
}

/// One application of the J operator to a unit-speed curve, in frame form.
///
/// Returns the new level and the predicted curvature pair κ̄ = κ cos θ,
/// τ̄ = κ sin θ (signed).
pub fn apply_j(curve: &Curve3, theta0: f64, cfg: &QuadratureConfig) -> Result<(ChainLevel, CurvaturePair)> {
    cfg.validate()?;
    check_unit_speed_input(curve)?;
    let domain = curve.domain();
    let theta = Arc::new(Theta::build(curve, FrameKind::Tangent, theta0, cfg)?);
    let tangent = |t: f64, order: usize| -> Result<VJet> {
        let f = curve.tangent_frame(t, order)?;
        let th = theta.jet(t, order, &f)?;
        Ok(step(&f, &th).point)
    };
    let position = if tangent_order(curve) >= 2 {
        let order = tangent_order(curve).min(TABLE_ORDER);
        CumulativeIntegral::with_jets(
            domain,
            cfg,
            &|t| Ok(tangent(t, 0)?.value()),
            &|t| Ok(tangent(t, order)?.coeffs().to_vec()),
        )?
    } else {
        let c = curve.clone();
        let th = theta.clone();
        let margin = curve.fd_margin(3);
        CumulativeIntegral::new(
            domain,
            cfg,
            Arc::new(move |t: f64| {
                let t = t.clamp(domain.min + margin, domain.max - margin);
                let f = c.tangent_frame(t, 0)?;
                Ok(step(&f, &th.jet(t, 0, &f)?).point.value())
            }),
        )?
    };
    let eval = Arc::new(JLevel { parent: curve.clone(), theta: theta.clone(), position: Arc::new(position) });
    let sing = singularities(
        curve,
        &theta,
        |t| Ok(curve.tangent_frame(t, 0)?.speed.value()),
        |t| theta_rate(curve, FrameKind::Tangent, t),
        1e-8,
    )?;
    let out = Curve3::from_eval(domain, tangent_order(curve) + 1, eval.clone())
        .with_singular(sing)
        .with_fd(curve.fd_config());
    let th = theta.clone();
    let (e1, e2) = (eval.clone(), eval.clone());
    let parent = curve.clone();
    let pair = CurvaturePair {
        kappa_bar: ScalarFn::new(move |t| Ok(e1.frame(t, 0)?.speed.value())),
        tau_bar: ScalarFn::new(move |t| {
            let f = parent.tangent_frame(t, 0)?;
            Ok(f.speed.value() * e2.theta.value(t)?.sin())
        }),
    };
    let e3 = eval.clone();
    let level = ChainLevel {
        level: 1,
        operator: Operator::J,
        curve: out,
        theta_fn: Some(ScalarFn::new(move |t| th.value(t))),
        weight_fn: Some(ScalarFn::new(move |t| Ok(e3.frame(t, 0)?.speed.value()))),
        parent: Some(curve.clone()),
        phase: Some(theta0),
    };
    Ok((level, pair))
}

fn check_depth(n: usize, phases: &PhaseVector, opts: &ChainOptions) -> Result<()> {
    if n > opts.depth_limit {
        return Err(Error::DepthLimit { requested: n, limit: opts.depth_limit });
    }
    if phases.thetas.len() != n {
        return Err(Error::BadParams(format!("{} phases for depth {n}", phases.thetas.len())));
    }
    Ok(())
}

/// Iterates I from a seed circle: level m is I^m(seed) built with phase θ_{m−1}.
pub fn chain_i(seed: &Curve3, n: usize, phases: &PhaseVector, cfg: &QuadratureConfig) -> Result<Vec<ChainLevel>> {
    chain_i_with(seed, n, phases, cfg, &ChainOptions::default())
}

pub fn chain_i_with(
    seed: &Curve3,
    n: usize,
    phases: &PhaseVector,
    cfg: &QuadratureConfig,
    opts: &ChainOptions,
) -> Result<Vec<ChainLevel>> {
    check_depth(n, phases, opts)?;
    if n > 0 {
        cfg.validate_for_chain()?;
    }
    if opts.strict_seed {
        check_circle(seed, true)?;
    }
    let mut levels = vec![ChainLevel::seed(seed.clone(), Operator::I)];
    for (m, &theta0) in phases.thetas.iter().enumerate() {
        let mut next = apply_i(&levels[m].curve, theta0, cfg)?;
        next.level = m + 1;
        levels.push(next);
    }
    Ok(levels)
}

/// Iterates J from a planar unit-speed seed.
pub fn chain_j(seed: &Curve3, n: usize, phases: &PhaseVector, cfg: &QuadratureConfig) -> Result<Vec<ChainLevel>> {
    chain_j_with(seed, n, phases, cfg, &ChainOptions::default())
}

pub fn chain_j_with(
    seed: &Curve3,
    n: usize,
    phases: &PhaseVector,
    cfg: &QuadratureConfig,
    opts: &ChainOptions,
) -> Result<Vec<ChainLevel>> {
    check_depth(n, phases, opts)?;
    if n > 0 {
        cfg.validate_for_chain()?;
    }
    if opts.strict_seed {
        check_circle(seed, false)?;
    }
    let mut levels = vec![ChainLevel::seed(seed.clone(), Operator::J)];
    for (m, &theta0) in phases.thetas.iter().enumerate() {
        let (mut next, _) = apply_j(&levels[m].curve, theta0, cfg)?;
        next.level = m + 1;
        levels.push(next);
    }
    Ok(levels)
}

/// Seed checks: spherical circles for I (constant κ, zero τ, on the sphere),
/// planar curves for J (zero τ).
fn check_circle(seed: &Curve3, spherical: bool) -> Result<()> {
    if spherical {
        check_spherical_input(seed)?;
    }
    let d = seed.domain();
    let m = seed.fd_margin(3);
    let ts = Interval { min: d.min + m, max: d.max - m }.grid(33);
    let mut kappas = Vec::new();
    for &t in &ts {
        let f = frenet_apparatus(seed, t)?;
        let tau = f.tau.ok_or(Error::InflectionPoint { t, kappa: f.kappa })?;
        if tau.abs() > 1e-6 {
            return Err(Error::BadParams(format!("seed is not planar: torsion {tau} at t = {t}")));
        }
        kappas.push(f.kappa);
    }
    if spherical {
        let k0 = kappas[0];
        if kappas.iter().any(|k| (k - k0).abs() > 1e-6 * k0.max(1.0)) {
            return Err(Error::BadParams("seed is not a circle (curvature varies)".into()));
        }
    }
    Ok(())
}

/// Tangent indicatrix t ↦ γ'/‖γ'‖, oriented by the curve's own direction
/// field when it carries one (so it is smooth through cusps).
pub fn tangent_indicatrix(curve: &Curve3) -> Result<Curve3> {
    let d = curve.domain();
    if !carries_sphere_frame(curve) && !carries_tangent_frame(curve) {
        let m = curve.fd_margin(1);
        for t in (Interval { min: d.min + m, max: d.max - m }).grid(65) {
            let v = curve.speed(t)?;
            if v < curve.speed_floor() {
                return Err(Error::IrregularCurve { t, speed: v });
            }
        }
    }
    let order = if carries_sphere_frame(curve) {
        curve.max_order()
    } else if carries_tangent_frame(curve) {
        curve.max_order().saturating_sub(1)
    } else {
        curve.max_order().saturating_sub(1)
    };
    let src = curve.clone();
    Ok(Curve3::from_eval(d, order, Arc::new(Indicatrix(src)))
        .with_spherical(true)
        .with_singular(curve.singularities().to_vec())
        .with_fd(curve.fd_config()))
}

struct Indicatrix(Curve3);

impl CurveEval for Indicatrix {
    fn jet(&self, t: f64, order: usize) -> Result<VJet> {
        self.0.unit_tangent(t, order)
    }

    fn sphere_frame(&self, t: f64, order: usize) -> Option<Result<SphereJet>> {
        if carries_tangent_frame(&self.0) {
            return self.0.evaluator().tangent_frame(t, order);
        }
        None
    }
}

/// I applied to the antipodal curve −γ. Satisfies I(−γ)(t, θ₀) = −I(γ)(t, −θ₀).
pub fn negate_then_i(curve: &Curve3, theta0: f64, cfg: &QuadratureConfig) -> Result<ChainLevel> {
    let src = curve.clone();
    let neg = Curve3::from_eval(curve.domain(), curve.max_order(), Arc::new(Negated(src)))
        .with_spherical(curve.is_spherical())
        .with_fd(curve.fd_config());
    apply_i(&neg, theta0, cfg)
}

struct Negated(Curve3);

impl CurveEval for Negated {
    fn jet(&self, t: f64, order: usize) -> Result<VJet> {
        Ok(-self.0.jet(t, order)?)
    }
}

/// κ̄ = κ cos(∫τ + θ₀), τ̄ = κ sin(∫τ + θ₀) from given curvature functions.
pub fn predicted_curvatures(
    kappa: ScalarFn,
    tau: ScalarFn,
    theta0: f64,
    domain: Interval,
    cfg: &QuadratureConfig,
) -> Result<CurvaturePair> {
    let tau_int = tau.clone();
    let table = Arc::new(CumulativeIntegral::new(domain, cfg, Arc::new(move |s| tau_int.eval(s)))?);
    let (k1, k2) = (kappa.clone(), kappa);
    let t2 = table.clone();
    Ok(CurvaturePair {
        kappa_bar: ScalarFn::new(move |s| Ok(k1.eval(s)? * (table.eval(s)? + theta0).cos())),
        tau_bar: ScalarFn::new(move |s| Ok(k2.eval(s)? * (t2.eval(s)? + theta0).sin())),
    })
}

/// The quadrature form of an I level: α(t_min) + ∫ S·γ_parent.
///
/// Independent of the frame form except for the starting point, so the
/// distance between the two is an end-to-end error measure.
pub fn i_quadrature_route(level: &ChainLevel, cfg: &QuadratureConfig) -> Result<Curve3> {
    let parent = level.parent.clone().ok_or_else(|| Error::BadParams("seed level has no parent".into()))?;
    let weight = level.weight_fn.clone().ok_or_else(|| Error::BadParams("seed level has no weight".into()))?;
    let d = level.curve.domain();
    let start = level.curve.point(d.min)?;
    let p = parent.clone();
    let table = CumulativeIntegral::new(d, cfg, Arc::new(move |t| Ok(p.point(t)? * weight.eval(t)?)))?;
    Ok(Curve3::from_fn(d, move |t| start + table.eval(t).unwrap_or_else(|_| Vector3::from_element(f64::NAN)))
        .with_spherical(true))
}

/// The second-order route for a J level: β'' = κ̄·T_parent integrated twice
/// from the frame-form values at s_min.
pub fn j_second_order_route(level: &ChainLevel, cfg: &QuadratureConfig) -> Result<Curve3> {
    let parent = level.parent.clone().ok_or_else(|| Error::BadParams("seed level has no parent".into()))?;
    let weight = level.weight_fn.clone().ok_or_else(|| Error::BadParams("seed level has no weight".into()))?;
    let d = level.curve.domain();
    let start = level.curve.point(d.min)?;
    let start_tangent = level.curve.unit_tangent(d.min, 0)?.value();
    let p = parent.clone();
    let velocity = Arc::new(CumulativeIntegral::new(
        d,
        cfg,
        Arc::new(move |t| Ok(p.unit_tangent(t, 0)?.value() * weight.eval(t)?)),
    )?);
    let position = CumulativeIntegral::new(d, cfg, Arc::new(move |t| Ok(start_tangent + velocity.eval(t)?)))?;
    Ok(Curve3::from_fn(d, move |t| start + position.eval(t).unwrap_or_else(|_| Vector3::from_element(f64::NAN))))
}
