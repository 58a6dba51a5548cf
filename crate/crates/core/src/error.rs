//! Error type shared by every module of the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Failures reported by the solver pipeline.
///
/// The variants are grouped so that front ends can map them onto exit codes:
/// configuration-type errors (bad input) versus numerical failures.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid user input: unknown geometry, malformed config, bad N, ...
    #[error("configuration error: {0}")]
    Config(String),
    /// An argument lies outside the domain of a mathematical function.
    #[error("domain error: {0}")]
    Domain(String),
    /// The boundary parametrization has (numerically) vanishing speed.
    #[error("degenerate parametrization: {0}")]
    DegenerateParametrization(String),
    /// Newton inversion of the arc-length map failed to converge.
    #[error("arc-length reparametrization failed: {0}")]
    Reparametrization(String),
    /// An operation was called with inputs violating its precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// LU factorization met a numerically zero pivot.
    #[error("numerically singular system: {0}")]
    SingularSystem(String),
    /// GMRES exhausted its iteration budget.
    #[error("GMRES did not converge in {iterations} iterations (best relative residual {residual:e})")]
    NonConvergence {
        /// Iterations performed.
        iterations: usize,
        /// Best relative residual reached.
        residual: f64,
    },
    /// An evaluation point is inside the scatterer.
    #[error("evaluation point ({x}, {y}) lies inside the boundary")]
    InteriorPoint {
        /// First coordinate.
        x: f64,
        /// Second coordinate.
        y: f64,
    },
    /// An evaluation point is in the near-field band where the rectangular rule is unreliable.
    #[error("evaluation point ({x}, {y}) is within {distance:.3e} of the boundary (exclusion band {band})")]
    NearField {
        /// First coordinate.
        x: f64,
        /// Second coordinate.
        y: f64,
        /// Distance to the boundary nodes.
        distance: f64,
        /// Exclusion band width.
        band: f64,
    },
    /// Any other numerical breakdown (eigen/SVD failure, non-finite entries).
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Filesystem failures while writing results.
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by invalid input rather than numerical breakdown.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Domain(_) | Error::Precondition(_) | Error::InteriorPoint { .. } | Error::NearField { .. }
        )
    }
}
