use faer::Mat;
use navier_bie::assembly::{assemble_system_general, hps_block, hps_eigenvalues};
use navier_bie::error::Error;
use navier_bie::geometry::builtin_curve;
use navier_bie::ops::block2;
use navier_bie::params::ProblemParams;
use navier_bie::solve::*;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(n: usize, seed: u64, shift: f64) -> Mat<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = Mat::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    for i in 0..n {
        m[(i, i)] += C64::new(shift, 0.0);
    }
    m
}

fn random_vec(n: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

#[test]
fn identity_system_is_solved_exactly() {
    let m = Mat::<C64>::identity(10, 10);
    let b = random_vec(10, 1);
    let d = solve_direct(m.as_ref(), &b).unwrap();
    assert_eq!(d.iterations, 0);
    assert!(dist(&d.solution, &b) < 1e-15);
    let g = solve_gmres(m.as_ref(), &b, 1e-9, None).unwrap();
    assert_eq!(g.iterations, 1);
    assert!(dist(&g.solution, &b) < 1e-14);
}

#[test]
fn random_well_conditioned_system_has_small_residual() {
    let m = random_matrix(64, 7, 20.0);
    let b = random_vec(64, 8);
    let r = solve_direct(m.as_ref(), &b).unwrap();
    assert!(r.residual < 1e-12, "{}", r.residual);
    assert!((relative_residual(m.as_ref(), &r.solution, &b) - r.residual).abs() < 1e-15);
}

#[test]
fn singular_matrix_is_reported() {
    let mut m = random_matrix(8, 3, 0.0);
    for j in 0..8 {
        let v = m[(0, j)];
        m[(1, j)] = v;
    }
    assert!(matches!(solve_direct(m.as_ref(), &random_vec(8, 4)), Err(Error::SingularSystem(_))));
}

#[test]
fn gmres_reports_non_convergence_with_best_residual() {
    let m = random_matrix(40, 11, 0.5);
    match solve_gmres(m.as_ref(), &random_vec(40, 12), 1e-12, Some(3)) {
        Err(Error::NonConvergence { iterations, residual }) => {
            assert_eq!(iterations, 3);
            assert!(residual > 1e-12 && residual <= 1.0);
        }
        other => panic!("expected non-convergence, got {other:?}"),
    }
}

#[test]
fn gmres_zero_rhs_returns_zero() {
    let m = random_matrix(6, 1, 3.0);
    let r = solve_gmres(m.as_ref(), &[C64::new(0.0, 0.0); 6], 1e-9, None).unwrap();
    assert_eq!(r.iterations, 0);
    assert!(r.solution.iter().all(|z| *z == C64::new(0.0, 0.0)));
}

#[test]
fn mismatched_rhs_is_rejected() {
    let m = Mat::<C64>::identity(4, 4);
    assert!(matches!(solve_direct(m.as_ref(), &[C64::new(1.0, 0.0); 3]), Err(Error::Precondition(_))));
    assert!(matches!(solve_gmres(m.as_ref(), &[C64::new(1.0, 0.0); 5], 1e-9, None), Err(Error::Precondition(_))));
}

#[test]
fn direct_and_gmres_agree_on_an_assembled_system() {
    let p = ProblemParams::paper_default(10.0).unwrap();
    let sys = assemble_system_general(&p, &builtin_curve("ellipse").unwrap(), 64, true).unwrap();
    let b = random_vec(128, 5);
    let d = solve_direct(sys.matrix.as_ref(), &b).unwrap();
    let g = solve_gmres(sys.matrix.as_ref(), &b, 1e-11, None).unwrap();
    let rel = dist(&d.solution, &g.solution) / dist(&d.solution, &vec![C64::new(0.0, 0.0); 128]);
    println!("GMRES iterations {}, relative difference {rel:e}", g.iterations);
    assert!(rel < 1e-8);
    assert!(g.residual <= 1e-11);
}

#[test]
fn identity_has_unit_condition_number() {
    let m = Mat::<C64>::identity(12, 12);
    assert!((condition_number(m.as_ref()).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn hermitian_matrix_has_real_spectrum() {
    let a = random_matrix(30, 9, 0.0);
    let h = Mat::from_fn(30, 30, |i, j| a[(i, j)] + a[(j, i)].conj());
    for z in spectrum(h.as_ref()).unwrap() {
        assert!(z.im.abs() < 1e-10, "{z}");
    }
}

#[test]
fn principal_block_matrix_has_two_eigenvalues() {
    let p = ProblemParams::paper_default(10.0).unwrap();
    let n = 16;
    let b = hps_block(&p);
    let m = block2(std::array::from_fn(|i| std::array::from_fn(|j| b[i][j].matrix(n))));
    let centers = hps_eigenvalues(&p);
    let eigs = spectrum(m.as_ref()).unwrap();
    assert_eq!(eigs.len(), 2 * n);
    for z in &eigs {
        let d = centers.iter().map(|c| (z - c).norm()).fold(f64::INFINITY, f64::min);
        assert!(d < 1e-10, "{z} not at an accumulation point");
    }
    assert_eq!(cluster_fraction(&eigs, &centers), 1.0);
}

#[test]
fn diagnostics_reject_oversized_matrices() {
    let m = Mat::<C64>::zeros(2, 3);
    assert!(spectrum(m.as_ref()).is_err());
    assert!(condition_number(m.as_ref()).is_err());
}

#[test]
fn solver_names_parse() {
    assert_eq!("gmres".parse::<SolverKind>().unwrap(), SolverKind::Gmres);
    assert_eq!("direct".parse::<SolverKind>().unwrap(), SolverKind::Direct);
    assert!("lu".parse::<SolverKind>().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn gmres_meets_its_tolerance_and_matches_lu(seed in 0u64..1000, n in 4usize..40) {
        let m = random_matrix(n, seed, 6.0);
        let b = random_vec(n, seed + 1);
        let g = solve_gmres(m.as_ref(), &b, 1e-10, None).unwrap();
        prop_assert!(g.residual <= 1e-10);
        prop_assert!(relative_residual(m.as_ref(), &g.solution, &b) <= 1e-10);
        let d = solve_direct(m.as_ref(), &b).unwrap();
        prop_assert!(dist(&d.solution, &g.solution) <= 1e-8 * dist(&d.solution, &vec![C64::new(0.0, 0.0); n]).max(1.0));
    }
}
