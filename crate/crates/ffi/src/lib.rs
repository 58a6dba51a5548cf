//! C ABI for the `navier-bie` solver.
//!
//! Objects cross the boundary as opaque handles (`NbProblem`, `NbSolution`)
//! created by `nb_*_new`/`nb_solve` and released with the matching `*_free`.
//! Every fallible function returns an [`NbStatus`]; on failure a description
//! is available from [`nb_last_error_message`] on the same thread. Panics are
//! caught at the boundary and reported as [`NbStatus::Panic`].
//!
//! Arrays are passed as pointer + length. Points are interleaved `(x, y)`
//! pairs; fields are returned as interleaved
//! `(Re u₁, Im u₁, Re u₂, Im u₂)` quadruples.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use navier_bie::error::Error;
use navier_bie::fields::{
    default_source_for, farfield_error, probe_circle, run_pipeline, NavierPointSource, ParamKind, Problem, Solution,
};
use navier_bie::geometry::builtin_curve;
use navier_bie::params::ProblemParams;
use navier_bie::solve::SolverKind;

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NbStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Invalid input (unknown geometry, bad N, bad parameters, non-UTF-8 string).
    InvalidArgument = 2,
    /// Numerical breakdown (eigen/SVD failure, non-finite values, reparametrization).
    Numerical = 3,
    /// The direct solver met a numerically zero pivot.
    SingularSystem = 4,
    /// GMRES did not reach the tolerance.
    NonConvergence = 5,
    /// An evaluation point lies inside the scatterer.
    InteriorPoint = 6,
    /// An evaluation point lies within the near-field exclusion band.
    NearField = 7,
    /// A Rust panic was caught at the boundary.
    Panic = 8,
    /// File-system failure.
    Io = 9,
}

/// Boundary parametrization.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NbParamKind {
    /// Arc-length resampling with the arc-length formulation.
    Arc = 0,
    /// The analytic parametrization with the general formulation.
    Natural = 1,
}

/// Linear solver.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NbSolver {
    /// LU with partial pivoting.
    Direct = 0,
    /// Unrestarted GMRES.
    Gmres = 1,
}

/// Summary of a solve.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NbSolveInfo {
    /// Grid size `N` (the system has `2N` unknowns).
    pub n: usize,
    /// GMRES matrix–vector products (0 for the direct solver).
    pub iterations: usize,
    /// Achieved relative residual.
    pub residual: f64,
    /// Assembly wall time in milliseconds.
    pub assemble_ms: f64,
    /// Solve wall time in milliseconds.
    pub solve_ms: f64,
}

/// Opaque problem handle: boundary, parameters, formulation and source.
pub struct NbProblem {
    problem: Problem,
    source: NavierPointSource,
}

/// Opaque handle to a solved problem.
pub struct NbSolution {
    solution: Solution,
    source: NavierPointSource,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> NbStatus {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::Precondition(_) => NbStatus::InvalidArgument,
        Error::SingularSystem(_) => NbStatus::SingularSystem,
        Error::NonConvergence { .. } => NbStatus::NonConvergence,
        Error::InteriorPoint { .. } => NbStatus::InteriorPoint,
        Error::NearField { .. } => NbStatus::NearField,
        Error::Io(_) => NbStatus::Io,
        Error::DegenerateParametrization(_) | Error::Reparametrization(_) | Error::Numerical(_) => NbStatus::Numerical,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (NbStatus, String)>) -> NbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NbStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            NbStatus::Panic
        }
    }
}

fn fail(e: Error) -> (NbStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (NbStatus, String) {
    (NbStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> (NbStatus, String) {
    (NbStatus::InvalidArgument, msg.into())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn nb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates a problem on a built-in geometry (`"ellipse"`, `"kite"`, `"cavity"`)
/// with Lamé constants `lambda`, `mu` at frequency `omega`. `eps <= 0` selects
/// the default complexification. The point source starts at the geometry's
/// default interior location with polarization `(1, 1)`.
#[no_mangle]
pub unsafe extern "C" fn nb_problem_new_builtin(
    geometry: *const c_char,
    kind: NbParamKind,
    omega: f64,
    lambda: f64,
    mu: f64,
    eps: f64,
    out: *mut *mut NbProblem,
) -> NbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if geometry.is_null() {
            return Err(null("geometry"));
        }
        let name = CStr::from_ptr(geometry).to_str().map_err(|_| invalid("geometry name is not UTF-8"))?;
        let curve = builtin_curve(name).map_err(fail)?;
        let params = ProblemParams::from_lame(omega, lambda, mu, (eps > 0.0).then_some(eps)).map_err(fail)?;
        let kind = match kind {
            NbParamKind::Arc => ParamKind::Arc,
            NbParamKind::Natural => ParamKind::Natural,
        };
        let source = NavierPointSource::new(params, default_source_for(name));
        let handle = Box::new(NbProblem { problem: Problem::new(curve, params, kind), source });
        *out = Box::into_raw(handle);
        Ok(())
    })
}

/// Moves the interior point source to `(x, y)`.
#[no_mangle]
pub unsafe extern "C" fn nb_problem_set_source(problem: *mut NbProblem, x: f64, y: f64) -> NbStatus {
    guard(|| {
        let p = problem.as_mut().ok_or_else(|| null("problem"))?;
        if !(x.is_finite() && y.is_finite()) {
            return Err(invalid("source coordinates must be finite"));
        }
        p.source.location = [x, y];
        Ok(())
    })
}

/// Enables (`true`) or disables the regularizer.
#[no_mangle]
pub unsafe extern "C" fn nb_problem_set_regularized(problem: *mut NbProblem, regularized: bool) -> NbStatus {
    guard(|| {
        let p = problem.as_mut().ok_or_else(|| null("problem"))?;
        p.problem.regularized = regularized;
        Ok(())
    })
}

/// Releases a problem handle (null is ignored).
#[no_mangle]
pub unsafe extern "C" fn nb_problem_free(problem: *mut NbProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Assembles and solves the `N`-point system (`tol` is the GMRES tolerance).
#[no_mangle]
pub unsafe extern "C" fn nb_solve(
    problem: *const NbProblem,
    n: usize,
    solver: NbSolver,
    tol: f64,
    out: *mut *mut NbSolution,
) -> NbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let p = problem.as_ref().ok_or_else(|| null("problem"))?;
        let solver = match solver {
            NbSolver::Direct => SolverKind::Direct,
            NbSolver::Gmres => SolverKind::Gmres,
        };
        let solution = run_pipeline(&p.problem, &p.source, n, solver, tol).map_err(fail)?;
        *out = Box::into_raw(Box::new(NbSolution { solution, source: p.source.clone() }));
        Ok(())
    })
}

/// Fills `info` with the solve summary.
#[no_mangle]
pub unsafe extern "C" fn nb_solution_info(solution: *const NbSolution, info: *mut NbSolveInfo) -> NbStatus {
    guard(|| {
        let s = solution.as_ref().ok_or_else(|| null("solution"))?;
        let info = info.as_mut().ok_or_else(|| null("info"))?;
        *info = NbSolveInfo {
            n: s.solution.system.n,
            iterations: s.solution.report.iterations,
            residual: s.solution.report.residual,
            assemble_ms: s.solution.assemble_time.as_secs_f64() * 1e3,
            solve_ms: s.solution.report.wall_time.as_secs_f64() * 1e3,
        };
        Ok(())
    })
}

/// Evaluates the scattered displacement at `count` points (`points`: `2·count`
/// doubles) into `out` (`4·count` doubles).
#[no_mangle]
pub unsafe extern "C" fn nb_solution_evaluate(
    solution: *const NbSolution,
    points: *const f64,
    count: usize,
    out: *mut f64,
) -> NbStatus {
    guard(|| {
        let s = solution.as_ref().ok_or_else(|| null("solution"))?;
        if count == 0 {
            return Ok(());
        }
        if points.is_null() {
            return Err(null("points"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let xy = std::slice::from_raw_parts(points, 2 * count);
        let pts: Vec<[f64; 2]> = xy.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
        let field = s.solution.evaluate(&pts).map_err(fail)?;
        let dst = std::slice::from_raw_parts_mut(out, 4 * count);
        for (d, u) in dst.chunks_exact_mut(4).zip(&field.u) {
            d.copy_from_slice(&[u[0].re, u[0].im, u[1].re, u[1].im]);
        }
        Ok(())
    })
}

/// Max error against the exact point-source field over `count` points on the
/// circle of radius `radius`.
#[no_mangle]
pub unsafe extern "C" fn nb_solution_farfield_error(
    solution: *const NbSolution,
    count: usize,
    radius: f64,
    out: *mut f64,
) -> NbStatus {
    guard(|| {
        let s = solution.as_ref().ok_or_else(|| null("solution"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if count == 0 || !(radius > 0.0) {
            return Err(invalid("probe circle needs at least one point and a positive radius"));
        }
        let field = s.solution.evaluate(&probe_circle(count, radius)).map_err(fail)?;
        *out = farfield_error(&field, &s.source).map_err(fail)?;
        Ok(())
    })
}

/// Releases a solution handle (null is ignored).
#[no_mangle]
pub unsafe extern "C" fn nb_solution_free(solution: *mut NbSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}
