use kslant::curve::FdConfig;
use kslant::gallery::{circular_helix, geodesic_circle_example, plane_circle, spherical_helix};
use kslant::jet::{Jet, VJet};
use kslant::*;
use nalgebra::Vector3;
use proptest::prelude::*;
use std::f64::consts::{PI, SQRT_2};

fn iv(a: f64, b: f64) -> Interval {
    Interval::new(a, b).unwrap()
}

#[test]
fn great_circle_has_speed_two_at_the_pole() {
    let d = eval_derivatives(&geodesic_circle_example(), 0.0, 1).unwrap();
    assert!((d[0] - Vector3::z()).norm() < 1e-15);
    assert!((d[1] - Vector3::new(-SQRT_2, SQRT_2, 0.0)).norm() < 1e-14);
    assert!((d[1].norm() - 2.0).abs() < 1e-14);
}

#[test]
fn constant_curve_derivatives_vanish() {
    let c = Curve3::analytic(iv(-1.0, 1.0), |t| {
        let k = |v| Jet::constant(v, t.order());
        VJet::new(k(1.5), k(-2.0), k(0.25))
    });
    for t in [-0.5, 0.0, 0.7] {
        let d = eval_derivatives(&c, t, 2).unwrap();
        assert_eq!(d[0], Vector3::new(1.5, -2.0, 0.25));
        assert_eq!(d[1], Vector3::zeros());
        assert_eq!(d[2], Vector3::zeros());
    }
}

#[test]
fn helix_derivatives_match_hand_differentiation() {
    // (0.6 cos s, 0.6 sin s, 0.8 s): γ' = (−0.6 sin s, 0.6 cos s, 0.8), γ'' = (−0.6 cos s, −0.6 sin s, 0)
    let h = circular_helix(0.6, 0.8).unwrap();
    let d = eval_derivatives(&h, 0.0, 2).unwrap();
    assert!((d[0] - Vector3::new(0.6, 0.0, 0.0)).norm() < 1e-15);
    assert!((d[1] - Vector3::new(0.0, 0.6, 0.8)).norm() < 1e-15);
    assert!((d[2] - Vector3::new(-0.6, 0.0, 0.0)).norm() < 1e-15);
    for s in [0.3, 1.9, 4.0] {
        let d = eval_derivatives(&h, s, 3).unwrap();
        let (sn, cs) = f64::sin_cos(s);
        assert!((d[1] - Vector3::new(-0.6 * sn, 0.6 * cs, 0.8)).norm() < 1e-14);
        assert!((d[3] - Vector3::new(0.6 * sn, -0.6 * cs, 0.0)).norm() < 1e-14);
    }
}

#[test]
fn out_of_domain_is_an_error() {
    let h = circular_helix(0.6, 0.8).unwrap();
    assert!(matches!(h.point(-0.1), Err(Error::OutOfDomain { .. })));
    assert!(matches!(h.point(7.0), Err(Error::OutOfDomain { .. })));
}

#[test]
fn cumulative_integral_examples() {
    let zero = cumulative_integral(|_| 0.0, iv(0.0, 3.0), &QuadratureConfig::default()).unwrap();
    for t in [0.0, 1.0, 2.5, 3.0] {
        assert_eq!(zero.eval(t).unwrap(), 0.0);
    }
    let cos = cumulative_integral(f64::cos, iv(0.0, PI), &QuadratureConfig::gauss(64)).unwrap();
    assert!((cos.eval(PI / 2.0).unwrap() - 1.0).abs() < 1e-10);
    // θ(t) − θ₀ for the small circle a = 0.6, w = 1.25
    let lin = cumulative_integral(|_| 0.6 * 1.25, iv(0.0, 2.0), &QuadratureConfig::default()).unwrap();
    assert!((lin.eval(1.0).unwrap() - 0.75).abs() < 1e-15);
}

#[test]
fn simpson_and_gauss_agree_on_a_smooth_integrand() {
    let f = |u: f64| (u.sin() + 2.0).ln();
    let d = iv(0.0, 3.0);
    let a = cumulative_integral(f, d, &QuadratureConfig::simpson(256)).unwrap();
    let b = cumulative_integral(f, d, &QuadratureConfig::gauss(16)).unwrap();
    for t in d.grid(31) {
        assert!((a.eval(t).unwrap() - b.eval(t).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn refinement_improves_simpson() {
    let d = iv(0.0, 1.0);
    let exact = 1.0f64.sin();
    let plain = cumulative_integral(f64::cos, d, &QuadratureConfig::simpson(4)).unwrap().eval(1.0).unwrap();
    let rich = QuadratureConfig { refinement: true, ..QuadratureConfig::simpson(4) };
    let refined = cumulative_integral(f64::cos, d, &rich).unwrap().eval(1.0).unwrap();
    assert!((refined - exact).abs() < 0.1 * (plain - exact).abs());
}

#[test]
fn unit_speed_helix_is_a_fixed_point_of_reparametrization() {
    let h = circular_helix(0.6, 0.8).unwrap();
    let u = arc_length_reparametrize(&h, &QuadratureConfig::default()).unwrap();
    assert!((u.domain().len() - h.domain().len()).abs() < 1e-10);
    let m = h.domain().grid(101).iter().map(|&s| (u.point(s).unwrap() - h.point(s).unwrap()).norm()).fold(0.0, f64::max);
    assert!(m < 1e-8, "{m}");
}

#[test]
fn radius_two_circle_has_length_four_pi() {
    let c = Curve3::analytic(iv(0.0, 2.0 * PI), |t| {
        let (s, c) = t.sin_cos();
        VJet::new(c * 2.0, s * 2.0, Jet::constant(0.0, t.order()))
    });
    let u = arc_length_reparametrize(&c, &QuadratureConfig::default()).unwrap();
    assert!((u.domain().len() - 4.0 * PI).abs() < 1e-12);
    for s in u.domain().grid(17) {
        assert!((u.speed(s).unwrap() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn speed_two_great_circle_rescales_by_two() {
    let g = geodesic_circle_example();
    let u = arc_length_reparametrize(&g, &QuadratureConfig::default()).unwrap();
    for t in g.domain().grid(21) {
        assert!((u.point(2.0 * t).unwrap() - g.point(t).unwrap()).norm() < 1e-10);
    }
}

#[test]
fn resample_examples() {
    let h = circular_helix(0.6, 0.8).unwrap();
    let two = resample(&h, 2, CurveMeta::default()).unwrap();
    assert_eq!(two.grid, vec![h.domain().min, h.domain().max]);

    let g = resample(&geodesic_circle_example(), 5, CurveMeta::default()).unwrap();
    assert_eq!(g.grid.len(), 5);
    assert!((g.grid[4] - PI).abs() < 1e-15);
    for i in 0..5 {
        assert!((g.point(i).norm() - 1.0).abs() <= 1e-15);
    }

    let many = resample(&h, 1024, CurveMeta::default()).unwrap();
    let step = h.domain().len() / 1023.0;
    for w in many.grid.windows(2) {
        assert!((w[1] - w[0] - step).abs() < 1e-13);
    }
    assert!(resample(&h, 1, CurveMeta::default()).is_err());
}

#[test]
fn sampled_curve_interpolant_reproduces_derivatives() {
    let h = circular_helix(0.6, 0.8).unwrap();
    let sampled = resample(&h, 2048, CurveMeta::default()).unwrap().to_curve().unwrap();
    for s in [0.5, 3.0, 6.0] {
        let a = h.derivatives(s, 3).unwrap();
        let b = sampled.derivatives(s, 3).unwrap();
        assert!((a[1] - b[1]).norm() < 1e-12);
        assert!((a[3] - b[3]).norm() < 1e-6);
    }
}

#[test]
fn finite_differences_refuse_the_boundary() {
    let fd = plane_circle(1.0).unwrap().sampled_only();
    assert!(fd.derivatives(0.0, 2).is_err());
    assert!(fd.derivatives(1.0, 2).is_ok());
}

fn fd_error(curve: &Curve3, t: f64, rel: f64, m: usize) -> f64 {
    let exact = curve.derivatives(t, m).unwrap()[m];
    let fd = curve.sampled_only().with_fd(FdConfig { rel_step: rel, ..Default::default() });
    (fd.derivatives(t, m).unwrap()[m] - exact).norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Halving the panel width shrinks the Simpson error at least eightfold.
    #[test]
    fn simpson_error_ratio(omega in 0.5f64..3.0, c in 0.0f64..2.0, a in 0.1f64..0.9, theta0 in 0.0f64..6.0) {
        let d = iv(0.0, 1.0);
        let w = 1.0 / (1.0 - a * a).sqrt();
        let cases: Vec<(Box<dyn Fn(f64) -> f64 + Send + Sync>, f64)> = vec![
            (Box::new(move |u: f64| (omega * u).cos()), omega.sin() / omega),
            (Box::new(move |u: f64| u.powi(5) + c * u.powi(4)), 1.0 / 6.0 + c / 5.0),
            (
                Box::new(move |u: f64| (a * w * u + theta0).cos()),
                ((a * w + theta0).sin() - theta0.sin()) / (a * w),
            ),
        ];
        for (f, exact) in cases {
            let f = std::sync::Arc::new(f);
            let err = |n: usize| {
                let g = f.clone();
                (cumulative_integral(move |u| g(u), d, &QuadratureConfig::simpson(n)).unwrap().eval(1.0).unwrap() - exact).abs()
            };
            let (e1, e2) = (err(4), err(8));
            prop_assert!(e1 >= 8.0 * e2, "errors {e1:e} -> {e2:e}");
        }
    }

    /// log-error against log-step has slope four for first and second derivatives.
    #[test]
    fn finite_difference_order(a in 0.3f64..1.5, b in 0.2f64..1.5, frac in 0.2f64..0.8) {
        let h = circular_helix(a, b).unwrap();
        let t = h.domain().min + frac * h.domain().len();
        for m in [1, 2] {
            let slope = (fd_error(&h, t, 4e-3, m) / fd_error(&h, t, 2e-3, m)).log2();
            prop_assert!((3.5..=4.5).contains(&slope), "order {m}: slope {slope}");
        }
    }

    #[test]
    fn reparametrization_is_idempotent(p in 0.5f64..2.0, q in 0.5f64..2.0, c in -1.0f64..1.0) {
        let curve = Curve3::analytic(iv(0.0, 3.0), move |t| {
            let (s, co) = (t * q).sin_cos();
            VJet::new(co * p, s, t * c + t * t * 0.1)
        });
        let cfg = QuadratureConfig::default();
        let once = arc_length_reparametrize(&curve, &cfg).unwrap();
        let twice = arc_length_reparametrize(&once, &cfg).unwrap();
        prop_assert!((once.domain().len() - twice.domain().len()).abs() < 1e-8);
        for s in once.domain().grid(64) {
            prop_assert!((once.point(s).unwrap() - twice.point(s).unwrap()).norm() < 1e-8);
            prop_assert!((twice.speed(s).unwrap() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn helix_segments_stay_on_the_sphere(a in 0.2f64..0.9, theta0 in 0.0f64..6.0) {
        let r = (1.0 - a * a).sqrt();
        let h = spherical_helix(a, r, theta0).unwrap();
        for t in h.domain().grid(50) {
            prop_assert!((h.point(t).unwrap().norm() - 1.0).abs() < 1e-14);
        }
    }
}
