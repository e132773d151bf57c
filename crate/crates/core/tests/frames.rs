use kslant::curve::CurveEval;
use kslant::frames::*;
use kslant::gallery::*;
use kslant::jet::{Jet, VJet};
use kslant::slant::{chain_i, chain_j, PhaseVector};
use kslant::verify::{sample_parameters, SampleOptions};
use kslant::*;
use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;
use std::sync::Arc;

fn line() -> Curve3 {
    Curve3::analytic(Interval::new(0.0, 1.0).unwrap(), |t| {
        let z = Jet::constant(0.0, t.order());
        VJet::new(t, z, z)
    })
}

fn orthonormal_defect(m: &Matrix3<f64>) -> f64 {
    (m * m.transpose() - Matrix3::identity()).abs().max()
}

#[test]
fn helix_curvature_and_torsion() {
    let h = circular_helix(0.6, 0.8).unwrap();
    for s in [0.0, 1.0, 5.0] {
        let f = frenet_apparatus(&h, s).unwrap();
        assert!((f.kappa - 0.6).abs() < 1e-14);
        assert!((f.tau.unwrap() - 0.8).abs() < 1e-14);
    }
}

#[test]
fn straight_line_is_an_inflection_everywhere() {
    let l = line();
    for t in [0.1, 0.5, 0.9] {
        let f = frenet_apparatus(&l, t).unwrap();
        assert_eq!(f.kappa, 0.0);
        assert!(f.normal.is_none() && f.tau.is_none());
        assert!(matches!(f.full(), Err(Error::InflectionPoint { .. })));
    }
}

#[test]
fn constant_precession_curvature_at_origin() {
    let c = constant_precession(0.6, 0.8, 1.0, 1.0).unwrap();
    let f = frenet_apparatus(&c, 0.0).unwrap();
    assert!((f.kappa - 0.6).abs() < 1e-13);
    // κ = aw²|cos(bw²s)|, τ = aw² sin(bw²s)
    let f = frenet_apparatus(&c, 1.0).unwrap();
    assert!((f.kappa - 0.6 * 0.8f64.cos()).abs() < 1e-13);
    assert!((f.tau.unwrap() - 0.6 * 0.8f64.sin()).abs() < 1e-13);
}

#[test]
fn frenet_along_keeps_the_normal_continuous() {
    let c = constant_precession(0.6, 0.8, 1.0, 1.0).unwrap();
    // κ changes sign at bw²s = π/2
    let ts: Vec<f64> = (0..=60).map(|i| 0.05 * i as f64).collect();
    let frames = frenet_along(&c, &ts).unwrap();
    for w in frames.windows(2) {
        assert!(w[0].normal.unwrap().dot(&w[1].normal.unwrap()) > 0.9);
    }
    assert!(frames.iter().any(|f| f.kappa < 0.0));
}

#[test]
fn geodesic_curvature_of_circles() {
    let great = circle(Vector3::zeros(), 1.0).unwrap();
    let small = circle(Vector3::new(0.0, 0.0, 0.6), 0.8).unwrap();
    for s in great.domain().grid(9) {
        assert!(sabban_frame(&great, s).unwrap().kappa_g.abs() < 1e-14);
    }
    for s in small.domain().grid(9) {
        let f = sabban_frame(&small, s).unwrap();
        assert!((f.kappa_g - 0.75).abs() < 1e-13);
        // brute force det(γ, T, T') on the closed form
        let d = small.derivatives(s, 2).unwrap();
        assert!((d[0].dot(&d[1].cross(&d[2])) - 0.75).abs() < 1e-13);
        assert!((geodesic_curvature(&small, s).unwrap() - 0.75).abs() < 1e-13);
    }
}

#[test]
fn sabban_frame_needs_unit_speed_on_the_sphere() {
    assert!(matches!(sabban_frame(&geodesic_circle_example(), 0.3), Err(Error::NotUnitSpeed { .. })));
    assert!(matches!(sabban_frame(&circular_helix(0.6, 0.8).unwrap(), 0.3), Err(Error::NotSpherical { .. })));
}

#[test]
fn spherical_helix_geodesic_curvature_by_two_routes() {
    let h = spherical_helix(0.6, 0.8, 0.0).unwrap();
    let fd = h.sampled_only();
    let mut spread: f64 = 0.0;
    for t in [0.4, 1.0, 1.6, 3.0, 4.0] {
        let a = geodesic_curvature(&h, t).unwrap();
        let b = geodesic_curvature(&fd, t).unwrap();
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        spread = spread.max((a - geodesic_curvature(&h, 0.4).unwrap()).abs());
    }
    assert!(spread > 1e-2, "κ_g should vary along the helix");
}

#[test]
fn psi_hierarchy_examples() {
    let h = circular_helix(0.6, 0.8).unwrap();
    let lv = psi_hierarchy(&h, 1, 1.3).unwrap();
    assert!(lv[0].sigma.unwrap().abs() < 1e-13);
    assert!(lv[0].psi.is_none());

    let pc = plane_circle(1.0).unwrap();
    let lv = psi_hierarchy(&pc, 0, 0.7).unwrap();
    assert!(lv[0].tau.abs() < 1e-15);
    assert!(lv[0].sigma.unwrap().abs() < 1e-15);

    let cp = constant_precession(0.6, 0.8, 1.0, 1.0).unwrap();
    for s in [0.0, 0.9, 2.5, 4.0] {
        let lv = psi_hierarchy(&cp, 1, s).unwrap();
        assert!((lv[1].kappa - 0.6).abs() < 1e-12, "κ₁ = {}", lv[1].kappa);
        assert!((lv[0].kappa.powi(2) + lv[0].tau.powi(2) - 0.36).abs() < 1e-12);
    }

    let sc = circle(Vector3::new(0.0, 0.0, 0.6), 0.8).unwrap();
    let lv = psi_hierarchy(&sc, 0, 0.2).unwrap();
    assert!((lv[0].psi.unwrap() - sc.point(0.2).unwrap()).norm() < 1e-15);
}

#[test]
fn darboux_examples() {
    let h = circular_helix(0.6, 0.8).unwrap();
    for s in h.domain().grid(13) {
        let d = centrode(&h, 0, s, None).unwrap();
        assert!((d.w - Vector3::z()).norm() < 1e-8);
        assert!(d.a.is_none());
    }
    let pc = plane_circle(1.0).unwrap();
    let d = centrode(&pc, 0, 0.4, None).unwrap();
    let b = frenet_apparatus(&pc, 0.4).unwrap().binormal.unwrap();
    assert!((d.w - b).norm() < 1e-14);

    let cp = constant_precession(0.6, 0.8, 1.0, -1.0).unwrap();
    let first = centrode(&cp, 0, 0.0, Some(0.8)).unwrap().a.unwrap();
    // the hierarchy's N flips where κ changes sign at 0.8s = π/2, so stay before it
    for s in [0.3, 1.0, 1.5, 1.9] {
        let a = centrode(&cp, 0, s, Some(0.8)).unwrap().a.unwrap();
        assert!((a.norm_squared() - 1.0).abs() < 1e-12);
        assert!((a - first).norm() < 1e-10);
    }
}

/// The normal indicatrix ψ₂ as a curve with exact jets.
struct NormalIndicatrix(Curve3);

impl CurveEval for NormalIndicatrix {
    fn jet(&self, t: f64, order: usize) -> Result<VJet> {
        let (psi, _) = psi_jets(&self.0, 2, order, t)?;
        Ok(psi[1])
    }
}

#[test]
fn sigma_is_the_geodesic_curvature_of_the_normal_indicatrix() {
    // N' = −κT + τB has constant length aw² = 0.6 here, so s = 0.6·t on the indicatrix
    let cp = constant_precession(0.6, 0.8, 1.0, 1.0).unwrap();
    let d = Interval::new(0.0, 1.5).unwrap();
    let n = Curve3::from_eval(d, 6, Arc::new(NormalIndicatrix(cp.clone()))).with_spherical(true);
    let unit = arc_length_reparametrize(&n, &QuadratureConfig::default()).unwrap();
    assert!((unit.domain().len() - 0.9).abs() < 1e-12);
    for t in [0.2, 0.6, 1.0, 1.3] {
        let sigma = psi_hierarchy(&cp, 0, t).unwrap()[0].sigma.unwrap();
        let sabban = sabban_frame(&unit, 0.6 * t).unwrap().kappa_g;
        assert!((sigma - sabban).abs() < 1e-5, "σ {sigma} vs κ_g {sabban}");
        assert!(sigma.abs() > 0.1);
    }
}

fn check_frames(curve: &Curve3) -> std::result::Result<(), TestCaseError> {
    let (ts, _) = sample_parameters(curve, 3, &SampleOptions::default());
    prop_assert!(ts.len() > 200);
    for t in ts {
        let f = frenet_apparatus(curve, t).unwrap();
        if f.normal.is_none() {
            continue;
        }
        let m = f.matrix().unwrap();
        prop_assert!(orthonormal_defect(&m) <= 1e-9);
        prop_assert!((m.determinant() - 1.0).abs() <= 1e-9);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gallery_frames_are_orthonormal(a in 0.2f64..0.9, b in 0.2f64..1.2, theta0 in 0.0f64..6.0) {
        let r = (1.0 - a * a).sqrt();
        check_frames(&circle(Vector3::new(0.0, 0.0, a), r).unwrap())?;
        check_frames(&spherical_helix(a, r, theta0).unwrap())?;
        check_frames(&circular_helix(a, b).unwrap())?;
        let w = 1.0 / (a * a + b * b).sqrt();
        if (1.0 - b * w).abs() > 1e-2 {
            check_frames(&constant_precession(a, b, w, 1.0).unwrap())?;
        }
    }

    #[test]
    fn chain_frames_are_orthonormal(t0 in 0.0f64..6.0, t1 in 0.0f64..6.0) {
        let cfg = QuadratureConfig::default();
        let seed = circle(Vector3::new(0.0, 0.0, 0.6), 0.8).unwrap();
        for l in chain_i(&seed, 2, &PhaseVector::new(vec![t0, t1]), &cfg).unwrap() {
            check_frames(&l.curve)?;
        }
        for l in chain_j(&plane_circle(1.0).unwrap(), 2, &PhaseVector::new(vec![t0, t1]), &cfg).unwrap() {
            check_frames(&l.curve)?;
        }
    }

    /// κ_k from the hierarchy against ‖ψ_{k+1}'‖/‖γ'‖ with ψ_{k+1} differenced numerically.
    #[test]
    fn recursion_consistency(a in 0.3f64..0.9, b in 0.3f64..1.0, frac in 0.2f64..0.8) {
        let w = 1.0 / (a * a + b * b).sqrt();
        prop_assume!((1.0 - b * w).abs() > 1e-2);
        let r = (1.0 - a * a).sqrt();
        let curves = [constant_precession(a, b, w, 1.0).unwrap(), spherical_helix(a, r, 0.3).unwrap()];
        for c in curves {
            let d = c.domain();
            let t = d.min + frac * d.len();
            prop_assume!(c.singularities().iter().all(|s| (s.t - t).abs() > 0.05));
            let lv = psi_hierarchy(&c, 1, t).unwrap();
            for k in 0..=1 {
                let src = c.clone();
                let psi = Curve3::from_fn(d, move |u| psi_vector(&src, k + 1, u).unwrap());
                let direct = psi.derivatives(t, 1).unwrap()[1].norm() / c.speed(t).unwrap();
                prop_assert!((direct - lv[k].kappa.abs()).abs() < 1e-6, "k={k}: {direct} vs {}", lv[k].kappa);
            }
        }
    }
}
