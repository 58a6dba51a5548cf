//! Physical and numerical problem parameters.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default complexification offset `ε(k) = 0.4·k^{1/3}`.
pub fn default_eps(k: f64) -> f64 {
    0.4 * k.cbrt()
}

/// Frequency, Lamé constants (unit density), wavenumbers and their complexified
/// counterparts `k̃ = k + iε` used by the regularizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    /// Angular frequency `ω`.
    pub omega: f64,
    /// First Lamé constant `λ`.
    pub lambda: f64,
    /// Shear modulus `μ`.
    pub mu: f64,
    /// Pressure wavenumber `k_p = ω/√(λ+2μ)`.
    pub k_p: f64,
    /// Shear wavenumber `k_s = ω/√μ`.
    pub k_s: f64,
    /// Complexification offset for `k_p`.
    pub eps_p: f64,
    /// Complexification offset for `k_s`.
    pub eps_s: f64,
}

impl ProblemParams {
    /// Parameters from `ω, λ, μ`; `eps = None` selects the default per-wavenumber offset.
    pub fn from_lame(omega: f64, lambda: f64, mu: f64, eps: Option<f64>) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::Config(format!("omega must be positive, got {omega}")));
        }
        if !(mu > 0.0) || !(lambda + 2.0 * mu > 0.0) {
            return Err(Error::Config(format!("Lamé constants must satisfy mu > 0 and lambda + 2 mu > 0 (lambda={lambda}, mu={mu})")));
        }
        let k_p = omega / (lambda + 2.0 * mu).sqrt();
        let k_s = omega / mu.sqrt();
        Self::assemble(omega, lambda, mu, k_p, k_s, eps)
    }

    /// Parameters from `ω` and explicit wavenumbers (`μ = ω²/k_s²`, `λ + 2μ = ω²/k_p²`).
    pub fn from_wavenumbers(omega: f64, k_p: f64, k_s: f64, eps: Option<f64>) -> Result<Self> {
        if !(omega > 0.0) || !(k_p > 0.0) || !(k_s > 0.0) {
            return Err(Error::Config(format!("omega, k_p, k_s must be positive (got {omega}, {k_p}, {k_s})")));
        }
        let mu = omega * omega / (k_s * k_s);
        let lambda = omega * omega / (k_p * k_p) - 2.0 * mu;
        Self::assemble(omega, lambda, mu, k_p, k_s, eps)
    }

    /// The experiment parameters `λ = 2, μ = 3` at frequency `ω`.
    pub fn paper_default(omega: f64) -> Result<Self> {
        Self::from_lame(omega, 2.0, 3.0, None)
    }

    fn assemble(omega: f64, lambda: f64, mu: f64, k_p: f64, k_s: f64, eps: Option<f64>) -> Result<Self> {
        let (eps_p, eps_s) = match eps {
            Some(e) => (e, e),
            None => (default_eps(k_p), default_eps(k_s)),
        };
        if !(eps_p > 0.0) || !(eps_s > 0.0) {
            return Err(Error::Config(format!("complexification offset must be positive, got {eps_p}, {eps_s}")));
        }
        Ok(Self { omega, lambda, mu, k_p, k_s, eps_p, eps_s })
    }

    /// `k̃_p = k_p + iε_p`.
    pub fn kt_p(&self) -> C64 {
        C64::new(self.k_p, self.eps_p)
    }

    /// `k̃_s = k_s + iε_s`.
    pub fn kt_s(&self) -> C64 {
        C64::new(self.k_s, self.eps_s)
    }

    /// Parameters for the same problem on a curve scaled to length `2π` from
    /// length `length`: every wavenumber (and offset) is multiplied by `L/(2π)`.
    /// The frequency is kept, so `λ, μ` follow from the new wavenumbers.
    pub fn rescale_wavenumbers(&self, length: f64) -> Result<Self> {
        if !(length > 0.0) {
            return Err(Error::Config(format!("curve length must be positive, got {length}")));
        }
        let s = length / (2.0 * std::f64::consts::PI);
        if s == 1.0 {
            return Ok(*self);
        }
        let mut out = Self::from_wavenumbers(self.omega, s * self.k_p, s * self.k_s, None)?;
        out.eps_p = s * self.eps_p;
        out.eps_s = s * self.eps_s;
        Ok(out)
    }
}
