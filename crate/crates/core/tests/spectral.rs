//! Fourier-multiplier identities, the closed-form logarithmic coefficients and
//! the exactness of the product-integration matrices.

use navier_bie::assembly::h0_block;
use navier_bie::spectral::*;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

mod common;

use common::*;

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn random_poly(n: usize, seed: u64) -> Vec<C64> {
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    (0..n).map(|_| C64::new(next(), next())).collect()
}

#[test]
fn hilbert_squares_to_minus_identity() {
    let h = FourierSymbol::hilbert();
    let x = random_poly(64, 1);
    let hh = h.apply(&h.apply(&x));
    let neg: Vec<C64> = x.iter().map(|z| -z).collect();
    assert!(max_diff(&hh, &neg) < 1e-13);
}

#[test]
fn antiderivative_inverts_derivative_off_the_mean() {
    let x = random_poly(64, 2);
    let got = FourierSymbol::deriv(-1).apply(&FourierSymbol::deriv(1).apply(&x));
    let mean = FourierSymbol::mean().apply(&x);
    let want: Vec<C64> = x.iter().zip(&mean).map(|(a, b)| a - b).collect();
    assert!(max_diff(&got, &want) < 1e-13);
}

#[test]
fn h0_is_nilpotent() {
    let n = 64;
    let b = h0_block();
    let x = [random_poly(n, 3), random_poly(n, 4)];
    let apply = |v: &[Vec<C64>; 2]| -> [Vec<C64>; 2] {
        std::array::from_fn(|i| {
            let (p, q) = (b[i][0].apply(&v[0]), b[i][1].apply(&v[1]));
            p.iter().zip(&q).map(|(a, c)| a + c).collect()
        })
    };
    let y = apply(&apply(&x));
    let zero = vec![C64::new(0.0, 0.0); n];
    assert!(max_diff(&y[0], &zero) < 1e-12 && max_diff(&y[1], &zero) < 1e-12);
}

#[test]
fn lambda_one_is_half_hd_minus_one() {
    let l1 = FourierSymbol::lambda(1).unwrap();
    let half = 0.5 * FourierSymbol::hd(-1);
    for n in -100..100 {
        assert!((l1.at(n) - half.at(n)).norm() < 1e-16, "n={n}");
    }
}

#[test]
fn closed_forms_match_quadrature() {
    let mut worst: f64 = 0.0;
    for r in 1..=4 {
        for n in -20..=20 {
            let q = rho_hat_quadrature(r, n);
            let err = (q - rho_hat(r, n).unwrap()).norm();
            worst = worst.max(err);
            assert!(err < 1e-11, "r={r} n={n}: closed {} vs quadrature {q}", rho_hat(r, n).unwrap());
        }
    }
    println!("worst closed-form residual {worst:e}");
}

#[test]
fn exceptional_low_index_values() {
    assert!((rho_hat(2, 3).unwrap() - 1.0 / 12.0).abs() < 1e-16);
    assert_eq!([0, 1, 2].map(|n| rho_hat(3, n).unwrap()), [-0.75, 1.0, -0.75]);
}

#[test]
fn product_integration_is_exact_on_the_band() {
    for n_grid in [16usize, 64, 256] {
        for r in 1..=4 {
            let delta = quadrature_matrix(|n| C64::new(rho_hat(r, n).unwrap(), 0.0), n_grid);
            for n in band(n_grid) {
                let e = mode_samples(n_grid, n);
                let got = matvec(&delta, &e);
                let lam = rho_hat(r, n).unwrap();
                let want: Vec<C64> = e.iter().map(|z| lam * z).collect();
                assert!(max_diff(&got, &want) < 1e-12, "N={n_grid} r={r} n={n}");
            }
        }
    }
}

#[test]
fn grid_function_rejects_odd_sizes() {
    assert!(GridFunction::new(vec![C64::new(1.0, 0.0); 7]).is_err());
    assert!(FourierSymbol::lambda(5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_round_trip(seed in 0u64..10_000, half in 2usize..64) {
        let x = random_poly(2 * half, seed);
        prop_assert!(max_diff(&inverse(&forward(&x)), &x) < 1e-13);
    }

    #[test]
    fn multiplier_matrix_matches_fft_application(seed in 0u64..10_000, r in -3i32..3, half in 4usize..40) {
        let n = 2 * half;
        let x = random_poly(n, seed);
        let s = FourierSymbol::hd(r);
        let m = s.matrix(n);
        let scale = x.iter().map(|z| z.norm()).fold(0.0, f64::max) * (half as f64).powi(r.max(0));
        prop_assert!(max_diff(&matvec(&m, &x), &s.apply(&x)) < 1e-12 * scale.max(1.0));
    }

    #[test]
    fn coefficient_recurrence(r in 2u32..=4, n in -100_000i64..100_000) {
        let lhs = rho_hat(r, n).unwrap();
        let (a, b) = (rho_hat(r - 1, n - 1).unwrap(), rho_hat(r - 1, n).unwrap());
        // The difference cancels; rounding is relative to the operands.
        prop_assert!((lhs - (a - b)).abs() <= 4e-16 * a.abs().max(b.abs()));
    }

    #[test]
    fn multipliers_commute(seed in 0u64..10_000) {
        let x = random_poly(32, seed);
        let (a, b) = (FourierSymbol::hd(-2), FourierSymbol::deriv(3));
        prop_assert!(max_diff(&a.apply(&b.apply(&x)), &b.apply(&a.apply(&x))) < 1e-10);
    }
}
