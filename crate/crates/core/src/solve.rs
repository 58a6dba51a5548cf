//! Dense direct and Krylov solvers for the assembled systems, plus the
//! spectral diagnostics (eigenvalues, condition numbers).

use std::str::FromStr;
use std::time::{Duration, Instant};

use faer::linalg::solvers::Solve;
use faer::{Mat, MatRef};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest system order accepted by the dense eigen/SVD diagnostics.
pub const MAX_DENSE_DIAGNOSTIC_ORDER: usize = 4096;

/// Relative pivot threshold of the direct solver.
pub const PIVOT_THRESHOLD: f64 = 1e-14;

/// Default GMRES tolerance (relative residual).
pub const DEFAULT_GMRES_TOL: f64 = 1e-9;

/// Linear solver choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    /// LU factorization with partial pivoting.
    Direct,
    /// Full (unrestarted) GMRES.
    Gmres,
}

impl SolverKind {
    /// Lower-case name used in configs and CSV output.
    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Direct => "direct",
            SolverKind::Gmres => "gmres",
        }
    }
}

impl FromStr for SolverKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(SolverKind::Direct),
            "gmres" => Ok(SolverKind::Gmres),
            other => Err(Error::Config(format!("unknown solver '{other}' (valid: direct, gmres)"))),
        }
    }
}

/// Outcome of a linear solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Solution vector `[λ_p; λ_s]` (length `2N`).
    pub solution: Vec<C64>,
    /// Solver used.
    pub method: SolverKind,
    /// Matrix–vector products (GMRES) or 0 (direct).
    pub iterations: usize,
    /// Achieved relative residual `‖Mx − b‖₂/‖b‖₂` (0 for `b = 0`).
    pub residual: f64,
    /// Wall-clock time of the solve.
    pub wall_time: Duration,
}

impl SolveReport {
    /// The pressure unknown `λ_p` (first half).
    pub fn lambda_p(&self) -> &[C64] {
        &self.solution[..self.solution.len() / 2]
    }

    /// The shear unknown `λ_s` (second half).
    pub fn lambda_s(&self) -> &[C64] {
        &self.solution[self.solution.len() / 2..]
    }
}

fn check_system(m: MatRef<'_, C64>, rhs: &[C64]) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Precondition(format!("system matrix must be square, got {}×{}", m.nrows(), m.ncols())));
    }
    if rhs.len() != m.nrows() {
        return Err(Error::Precondition(format!("right-hand side has length {}, expected {}", rhs.len(), m.nrows())));
    }
    Ok(())
}

fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn matvec(m: MatRef<'_, C64>, x: &[C64]) -> Vec<C64> {
    let mut y = vec![C64::new(0.0, 0.0); m.nrows()];
    for (j, &xj) in x.iter().enumerate() {
        if xj == C64::new(0.0, 0.0) {
            continue;
        }
        let col = m.col(j);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += col[i] * xj;
        }
    }
    y
}

/// Relative residual `‖Mx − b‖₂/‖b‖₂` (absolute residual when `b = 0`).
pub fn relative_residual(m: MatRef<'_, C64>, x: &[C64], b: &[C64]) -> f64 {
    let r: Vec<C64> = matvec(m, x).iter().zip(b).map(|(a, b)| a - b).collect();
    let nb = norm2(b);
    if nb == 0.0 {
        norm2(&r)
    } else {
        norm2(&r) / nb
    }
}

/// Solves `Mx = b` by LU with partial pivoting.
///
/// Fails with [`Error::SingularSystem`] when a pivot is below
/// `1e−14·‖M‖_F`.
pub fn solve_direct(m: MatRef<'_, C64>, rhs: &[C64]) -> Result<SolveReport> {
    check_system(m, rhs)?;
    let start = Instant::now();
    let lu = m.partial_piv_lu();
    let scale = m.norm_l2();
    let u = lu.U();
    for i in 0..u.nrows() {
        let p = u[(i, i)].norm();
        if !(p > PIVOT_THRESHOLD * scale) {
            return Err(Error::SingularSystem(format!("pivot {i} has magnitude {p:e} (‖M‖_F = {scale:e})")));
        }
    }
    let b = Mat::from_fn(rhs.len(), 1, |i, _| rhs[i]);
    let x = lu.solve(&b);
    let solution: Vec<C64> = (0..rhs.len()).map(|i| x[(i, 0)]).collect();
    let residual = relative_residual(m, &solution, rhs);
    Ok(SolveReport { solution, method: SolverKind::Direct, iterations: 0, residual, wall_time: start.elapsed() })
}

/// Solves `Mx = b` by full GMRES from `x₀ = 0` (Arnoldi with modified
/// Gram–Schmidt and one reorthogonalization pass, Givens rotations for the
/// least-squares problem).
///
/// The iteration count is the number of matrix–vector products. Stops once the
/// true relative residual is at most `tol`; fails with
/// [`Error::NonConvergence`] after `max_iter` products (default `2N`).
pub fn solve_gmres(m: MatRef<'_, C64>, rhs: &[C64], tol: f64, max_iter: Option<usize>) -> Result<SolveReport> {
    check_system(m, rhs)?;
    if !(tol > 0.0) {
        return Err(Error::Config(format!("GMRES tolerance must be positive, got {tol}")));
    }
    let start = Instant::now();
    let n = rhs.len();
    let max_iter = max_iter.unwrap_or(n).max(1);
    let beta = norm2(rhs);
    let zero = C64::new(0.0, 0.0);
    if beta == 0.0 {
        return Ok(SolveReport { solution: vec![zero; n], method: SolverKind::Gmres, iterations: 0, residual: 0.0, wall_time: start.elapsed() });
    }

    let mut basis: Vec<Vec<C64>> = vec![rhs.iter().map(|z| z / beta).collect()];
    // Columns of the (rotated) Hessenberg matrix, each of length j + 2.
    let mut hess: Vec<Vec<C64>> = Vec::new();
    let mut rot: Vec<(f64, C64)> = Vec::new();
    let mut g = vec![C64::new(beta, 0.0)];
    let mut best = 1.0;

    let solution_of = |hess: &[Vec<C64>], g: &[C64], basis: &[Vec<C64>]| {
        let k = hess.len();
        let mut y = vec![zero; k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for (j, yj) in y.iter().enumerate().skip(i + 1) {
                s -= hess[j][i] * yj;
            }
            y[i] = s / hess[i][i];
        }
        let mut x = vec![zero; n];
        for (v, yj) in basis.iter().zip(&y) {
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += vi * yj;
            }
        }
        x
    };

    for j in 0..max_iter {
        let mut w = matvec(m, &basis[j]);
        let mut h = vec![zero; j + 2];
        for _pass in 0..2 {
            for (i, v) in basis.iter().enumerate() {
                let c: C64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                h[i] += c;
                for (wk, vk) in w.iter_mut().zip(v) {
                    *wk -= c * vk;
                }
            }
        }
        let hnext = norm2(&w);
        h[j + 1] = C64::new(hnext, 0.0);
        for (i, &(c, s)) in rot.iter().enumerate() {
            let (a, b) = (h[i], h[i + 1]);
            h[i] = c * a + s * b;
            h[i + 1] = -s.conj() * a + c * b;
        }
        // New rotation annihilating h[j + 1].
        let (a, b) = (h[j], h[j + 1]);
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 {
            (1.0, zero)
        } else if a.norm() == 0.0 {
            (0.0, b.conj() / b.norm())
        } else {
            let c = a.norm() / r;
            (c, (a / a.norm()) * b.conj() / r)
        };
        h[j] = c * a + s * b;
        h[j + 1] = zero;
        rot.push((c, s));
        let gj = g[j];
        g[j] = c * gj;
        g.push(-s.conj() * gj);
        hess.push(h);

        let estimate = g[j + 1].norm() / beta;
        best = f64::min(best, estimate);
        let breakdown = hnext <= 1e-14 * beta;
        if estimate <= tol || breakdown || j + 1 == max_iter {
            let x = solution_of(&hess, &g, &basis);
            let residual = relative_residual(m, &x, rhs);
            if residual <= tol {
                return Ok(SolveReport { solution: x, method: SolverKind::Gmres, iterations: j + 1, residual, wall_time: start.elapsed() });
            }
            best = f64::min(best, residual);
            if breakdown {
                return Err(Error::NonConvergence { iterations: j + 1, residual: best });
            }
        }
        basis.push(w.iter().map(|z| z / hnext).collect());
    }
    Err(Error::NonConvergence { iterations: max_iter, residual: best })
}

/// Dispatches to [`solve_direct`] or [`solve_gmres`] (GMRES uses `tol` and the default iteration cap).
pub fn solve(m: MatRef<'_, C64>, rhs: &[C64], kind: SolverKind, tol: f64) -> Result<SolveReport> {
    match kind {
        SolverKind::Direct => solve_direct(m, rhs),
        SolverKind::Gmres => solve_gmres(m, rhs, tol, None),
    }
}

fn check_diagnostic(m: MatRef<'_, C64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Precondition(format!("matrix must be square, got {}×{}", m.nrows(), m.ncols())));
    }
    if m.nrows() > MAX_DENSE_DIAGNOSTIC_ORDER {
        return Err(Error::Precondition(format!(
            "dense diagnostics are limited to order {MAX_DENSE_DIAGNOSTIC_ORDER}, got {}",
            m.nrows()
        )));
    }
    Ok(())
}

/// All eigenvalues of `m` (unordered), by a dense eigensolver.
pub fn spectrum(m: MatRef<'_, C64>) -> Result<Vec<C64>> {
    check_diagnostic(m)?;
    m.eigenvalues().map_err(|e| Error::Numerical(format!("eigenvalue computation failed: {e:?}")))
}

/// 2-norm condition number `σ_max/σ_min` from the singular values.
pub fn condition_number(m: MatRef<'_, C64>) -> Result<f64> {
    check_diagnostic(m)?;
    let s = m.singular_values().map_err(|e| Error::Numerical(format!("SVD failed: {e:?}")))?;
    let (max, min) = (s.first().copied().unwrap_or(0.0), s.last().copied().unwrap_or(0.0));
    Ok(if min == 0.0 { f64::INFINITY } else { max / min })
}

/// Fraction of `eigs` lying within `max(1, 0.05|c|)` of one of `centers`.
pub fn cluster_fraction(eigs: &[C64], centers: &[C64]) -> f64 {
    if eigs.is_empty() {
        return 0.0;
    }
    let inside = eigs.iter().filter(|z| centers.iter().any(|c| (*z - c).norm() <= f64::max(1.0, 0.05 * c.norm()))).count();
    inside as f64 / eigs.len() as f64
}
