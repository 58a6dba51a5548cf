use std::f64::consts::PI;

use navier_bie::geometry::{arclength_reparametrize, builtin_curve, circle, CurveKind, BUILTIN_NAMES};
use navier_bie::spectral::{forward, inverse, mode_of};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

#[test]
fn builtin_scales_give_length_two_pi() {
    let expected_r = [0.6485, 0.50096, 0.6799];
    for (name, r) in BUILTIN_NAMES.iter().zip(expected_r) {
        let c = builtin_curve(name).unwrap();
        assert!((c.length() - 2.0 * PI).abs() < 1e-10, "{name}: {}", c.length());
        assert!((c.record().r - r).abs() < 5e-5, "{name}: r = {}", c.record().r);
        assert_eq!(c.kind(), CurveKind::AnalyticFormula);
    }
}

#[test]
fn ellipse_reference_points() {
    let c = builtin_curve("ellipse").unwrap();
    let p0 = c.position(0.0);
    assert!((p0[0] - 0.6485).abs() < 5e-5 && p0[1].abs() < 1e-15);
    let p1 = c.position(PI / 2.0);
    assert!(p1[0].abs() < 1e-15 && (p1[1] - 1.2970).abs() < 1e-4);
    let f = c.frame(0.0).unwrap();
    assert!(dist(f.tangent, [0.0, 1.0]) < 1e-15);
    assert!(dist(f.normal, [1.0, 0.0]) < 1e-15);
}

#[test]
fn circle_curvature_is_one() {
    let c = circle(1.0).unwrap();
    for j in 0..16 {
        let f = c.frame(0.4 * j as f64).unwrap();
        assert!((f.kappa - 1.0).abs() < 1e-14);
        assert!((f.eta - 1.0).abs() < 1e-14);
    }
}

#[test]
fn kite_speed_matches_finite_difference() {
    let c = builtin_curve("kite").unwrap();
    let h = 1e-5;
    let a = c.position(h);
    let b = c.position(-h);
    let fd = dist(a, b) / (2.0 * h);
    assert!((fd - c.frame(0.0).unwrap().eta).abs() < 1e-8);
}

#[test]
fn spectral_derivative_matches_analytic() {
    let n = 512;
    for name in BUILTIN_NAMES {
        let c = builtin_curve(name).unwrap();
        for comp in 0..2 {
            let vals: Vec<C64> =
                (0..n).map(|j| C64::new(c.position(2.0 * PI * j as f64 / n as f64)[comp], 0.0)).collect();
            let mut coef = forward(&vals);
            for (j, v) in coef.iter_mut().enumerate() {
                let m = mode_of(j, n);
                *v *= if m == -(n as i64) / 2 { C64::new(0.0, 0.0) } else { C64::new(0.0, m as f64) };
            }
            let d = inverse(&coef);
            for (j, v) in d.iter().enumerate() {
                let exact = c.derivative(2.0 * PI * j as f64 / n as f64, 1)[comp];
                assert!((v.re - exact).abs() < 1e-10, "{name}");
            }
        }
    }
}

#[test]
fn arclength_resampling_has_unit_speed() {
    for name in BUILTIN_NAMES {
        let c = builtin_curve(name).unwrap();
        let a = arclength_reparametrize(&c, 4096).unwrap();
        assert_eq!(a.kind(), CurveKind::ResampledArcLength);
        assert!((a.length() - c.length()).abs() < 1e-10, "{name}");
        let mut worst: f64 = 0.0;
        for f in a.node_frames(512).unwrap() {
            worst = worst.max((f.eta - 1.0).abs());
        }
        eprintln!("{name}: max |eta-1| = {worst:e}");
        assert!(worst < 1e-10, "{name}: {worst:e}");
        // Off-node points still lie on the original trace.
        for j in 0..7 {
            let p = a.position(0.37 + 0.9 * j as f64);
            assert!(c.distance_to(p) < 1e-10, "{name}: {}", c.distance_to(p));
        }
    }
}

#[test]
fn circle_resampling_is_identity_up_to_phase() {
    let c = circle(1.0).unwrap();
    let a = arclength_reparametrize(&c, 256).unwrap();
    for j in 0..32 {
        let t = 2.0 * PI * j as f64 / 32.0;
        assert!(dist(a.position(t), c.position(t)) < 1e-12);
        assert!((a.frame(t).unwrap().eta - 1.0).abs() < 1e-12);
    }
}

#[test]
fn resampling_is_idempotent() {
    let c = builtin_curve("ellipse").unwrap();
    let a = arclength_reparametrize(&c, 1024).unwrap();
    let b = arclength_reparametrize(&a, 1024).unwrap();
    for j in 0..64 {
        let t = 2.0 * PI * j as f64 / 64.0;
        assert!(dist(a.position(t), b.position(t)) < 1e-10);
    }
}

#[test]
fn rejects_bad_grid_size() {
    let c = builtin_curve("ellipse").unwrap();
    assert!(arclength_reparametrize(&c, 100).is_err());
    assert!(arclength_reparametrize(&c, 128).is_err());
}

#[test]
fn interior_test() {
    let c = builtin_curve("kite").unwrap();
    assert!(c.contains([0.1, 0.0]));
    assert!(!c.contains([3.0, 0.0]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn periodic_and_orthonormal(t in -10.0f64..10.0, which in 0usize..3) {
        let c = builtin_curve(BUILTIN_NAMES[which]).unwrap();
        prop_assert!(dist(c.position(t + 2.0 * PI), c.position(t)) < 1e-12);
        let f = c.frame(t).unwrap();
        prop_assert!(f.eta > 0.0);
        prop_assert!((f.tangent[0] * f.normal[0] + f.tangent[1] * f.normal[1]).abs() < 1e-14);
        prop_assert!(((f.normal[0].powi(2) + f.normal[1].powi(2)) - 1.0).abs() < 1e-14);
    }
}
