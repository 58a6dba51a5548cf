//! Periodic grids, Fourier coefficients, Fourier multipliers and the
//! product-integration matrices built from them.
//!
//! Conventions:
//!
//! * nodes `t_m = 2πm/N`, `N` even;
//! * `e_n(t) = exp(int)` and `f̂(n) = (1/N) Σ_m f(t_m) e_{-n}(t_m)`;
//! * the band of resolved modes is `−N/2 ≤ n < N/2` (the Nyquist mode is
//!   assigned wholly to `n = −N/2`).

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Iterator over the band `−N/2 ≤ n < N/2`.
pub fn band(n_grid: usize) -> impl Iterator<Item = i64> {
    let h = (n_grid / 2) as i64;
    -h..(n_grid as i64 - h)
}

/// Position of mode `n` (taken modulo `N`) in FFT ordering.
pub fn fft_index(n: i64, n_grid: usize) -> usize {
    n.rem_euclid(n_grid as i64) as usize
}

/// Mode represented by FFT slot `j` under the band convention.
pub fn mode_of(j: usize, n_grid: usize) -> i64 {
    if j < n_grid / 2 {
        j as i64
    } else {
        j as i64 - n_grid as i64
    }
}

/// Grid nodes `t_m = 2πm/N`.
pub fn nodes(n_grid: usize) -> Vec<f64> {
    (0..n_grid).map(|m| 2.0 * std::f64::consts::PI * m as f64 / n_grid as f64).collect()
}

/// Forward transform: node values → band coefficients (FFT order).
pub fn forward(values: &[C64]) -> Vec<C64> {
    let n = values.len();
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let s = 1.0 / n as f64;
    buf.iter_mut().for_each(|v| *v *= s);
    buf
}

/// Inverse transform: band coefficients (FFT order) → node values.
pub fn inverse(coeffs: &[C64]) -> Vec<C64> {
    let mut buf = coeffs.to_vec();
    FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
    buf
}

/// A Fourier multiplier symbol `n ↦ σ(n)`, evaluated lazily on demand.
#[derive(Clone)]
pub struct FourierSymbol {
    f: Arc<dyn Fn(i64) -> C64 + Send + Sync>,
}

impl std::fmt::Debug for FourierSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FourierSymbol(σ(0)={}, σ(1)={})", self.at(0), self.at(1))
    }
}

impl FourierSymbol {
    /// Wraps an arbitrary closed-form symbol.
    pub fn from_fn(f: impl Fn(i64) -> C64 + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f) }
    }

    /// Constant symbol `c` (i.e. `c·I`).
    pub fn constant(c: C64) -> Self {
        Self::from_fn(move |_| c)
    }

    /// Identity.
    pub fn identity() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    /// Hilbert-type multiplier `H`: `i·sign(n)` with `H e_0 = i e_0`.
    pub fn hilbert() -> Self {
        Self::from_fn(|n| if n >= 0 { I } else { -I })
    }

    /// `D_r`: `(in)^r` for `n ≠ 0`, and `0` at `n = 0` unless `r = 0`.
    pub fn deriv(r: i32) -> Self {
        Self::from_fn(move |n| {
            if r == 0 {
                C64::new(1.0, 0.0)
            } else if n == 0 {
                C64::new(0.0, 0.0)
            } else {
                (I * n as f64).powi(r)
            }
        })
    }

    /// Mean-value projector `J`.
    pub fn mean() -> Self {
        Self::from_fn(|n| if n == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }

    /// `H D_r`.
    pub fn hd(r: i32) -> Self {
        Self::hilbert() * Self::deriv(r)
    }

    /// `Λ_r`: multiplier with symbol `ρ̂_r(n)`.
    pub fn lambda(r: u32) -> Result<Self> {
        rho_hat(r, 0)?;
        Ok(Self::from_fn(move |n| C64::new(rho_hat(r, n).unwrap_or(0.0), 0.0)))
    }

    /// Shift of the symbol: `n ↦ σ(n − s)`.
    pub fn shifted(&self, s: i64) -> Self {
        let f = self.f.clone();
        Self::from_fn(move |n| f(n - s))
    }

    /// Evaluates the symbol at mode `n`.
    pub fn at(&self, n: i64) -> C64 {
        (self.f)(n)
    }

    /// Symbol values over the band in FFT order.
    pub fn fft_table(&self, n_grid: usize) -> Vec<C64> {
        (0..n_grid).map(|j| self.at(mode_of(j, n_grid))).collect()
    }

    /// Applies the multiplier to node values.
    pub fn apply(&self, values: &[C64]) -> Vec<C64> {
        let n = values.len();
        let mut c = forward(values);
        for (j, v) in c.iter_mut().enumerate() {
            *v *= self.at(mode_of(j, n));
        }
        inverse(&c)
    }

    /// Dense `N×N` matrix of the multiplier acting on node values.
    pub fn matrix(&self, n_grid: usize) -> Mat<C64> {
        quadrature_matrix(|n| self.at(n), n_grid)
    }
}

impl Mul for FourierSymbol {
    type Output = FourierSymbol;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (self.f, rhs.f);
        Self::from_fn(move |n| a(n) * b(n))
    }
}

impl Add for FourierSymbol {
    type Output = FourierSymbol;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = (self.f, rhs.f);
        Self::from_fn(move |n| a(n) + b(n))
    }
}

impl Sub for FourierSymbol {
    type Output = FourierSymbol;
    fn sub(self, rhs: Self) -> Self {
        let (a, b) = (self.f, rhs.f);
        Self::from_fn(move |n| a(n) - b(n))
    }
}

impl Neg for FourierSymbol {
    type Output = FourierSymbol;
    fn neg(self) -> Self {
        let a = self.f;
        Self::from_fn(move |n| -a(n))
    }
}

impl Mul<FourierSymbol> for C64 {
    type Output = FourierSymbol;
    fn mul(self, rhs: FourierSymbol) -> FourierSymbol {
        let a = rhs.f;
        FourierSymbol::from_fn(move |n| self * a(n))
    }
}

impl Mul<FourierSymbol> for f64 {
    type Output = FourierSymbol;
    fn mul(self, rhs: FourierSymbol) -> FourierSymbol {
        C64::new(self, 0.0) * rhs
    }
}

/// Complex node values of a `2π`-periodic function on the `N`-point grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    /// Values at `t_m = 2πm/N`.
    pub values: Vec<C64>,
}

impl GridFunction {
    /// Wraps node values; `N` must be even and positive.
    pub fn new(values: Vec<C64>) -> Result<Self> {
        if values.is_empty() || values.len() % 2 != 0 {
            return Err(Error::Domain(format!("grid size must be even and positive, got {}", values.len())));
        }
        Ok(Self { values })
    }

    /// Samples `f` at the nodes.
    pub fn sample(n_grid: usize, f: impl Fn(f64) -> C64) -> Result<Self> {
        Self::new(nodes(n_grid).into_iter().map(f).collect())
    }

    /// The Fourier mode `e_n` on the grid.
    pub fn mode(n_grid: usize, n: i64) -> Result<Self> {
        Self::sample(n_grid, |t| (I * (n as f64 * t)).exp())
    }

    /// Builds the grid function with prescribed band coefficients (FFT order).
    pub fn from_coefficients(coeffs: &[C64]) -> Result<Self> {
        Self::new(inverse(coeffs))
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True when there are no nodes (never for a valid grid function).
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Band coefficients in FFT order.
    pub fn coefficients(&self) -> Vec<C64> {
        forward(&self.values)
    }

    /// Coefficient of mode `n` (aliased into the band).
    pub fn coefficient(&self, n: i64) -> C64 {
        self.coefficients()[fft_index(n, self.len())]
    }

    /// Evaluates the trigonometric interpolant `Q_N f` at an arbitrary `t`.
    pub fn evaluate_at(&self, t: f64) -> C64 {
        let n = self.len();
        self.coefficients()
            .iter()
            .enumerate()
            .map(|(j, c)| c * (I * (mode_of(j, n) as f64 * t)).exp())
            .sum()
    }

    /// Applies a Fourier multiplier.
    pub fn apply(&self, sym: &FourierSymbol) -> GridFunction {
        GridFunction { values: sym.apply(&self.values) }
    }

    /// Sobolev norm `(|f̂(0)|² + Σ_{n≠0} |n|^{2s}|f̂(n)|²)^{1/2}` over the band.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let n = self.len();
        self.coefficients()
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let m = mode_of(j, n);
                let w = if m == 0 { 1.0 } else { (m.abs() as f64).powf(2.0 * s) };
                w * c.norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Fourier coefficients `ρ̂_r(n)` of `ρ_r(τ) = −(e_1(τ)−1)^{r−1} log(2|sin(τ/2)|)`.
///
/// Closed forms for `r = 1..4`, including the exceptional low indices. They
/// obey `ρ̂_r(n) = ρ̂_{r−1}(n−1) − ρ̂_{r−1}(n)`.
pub fn rho_hat(r: u32, n: i64) -> Result<f64> {
    let nf = n as f64;
    let sgn = if n >= 0 { 1.0 } else { -1.0 };
    let v = match r {
        1 => {
            if n == 0 {
                0.0
            } else {
                0.5 / nf.abs()
            }
        }
        2 => match n {
            0 => 0.5,
            1 => -0.5,
            _ => sgn / (2.0 * nf * (nf - 1.0)),
        },
        3 => match n {
            0 | 2 => -0.75,
            1 => 1.0,
            _ => 1.0 / (nf * (nf - 1.0) * (nf - 2.0)).abs(),
        },
        4 => match n {
            0 => 11.0 / 12.0,
            1 => -7.0 / 4.0,
            2 => 7.0 / 4.0,
            3 => -11.0 / 12.0,
            _ => 3.0 * sgn / (nf * (nf - 1.0) * (nf - 2.0) * (nf - 3.0)),
        },
        _ => return Err(Error::Domain(format!("ρ̂_r is tabulated for r = 1..4, got r = {r}"))),
    };
    Ok(v)
}

/// Product-integration matrix `Δ_N` for the coefficient family `δ̂`:
/// `Δ[l,m] = (1/N) Σ_{n in band} δ̂(n) e^{in(t_l − t_m)}`.
///
/// Applied to node samples of `g ∈ 𝕋_N` it returns the node values of
/// `Σ δ̂(n) ĝ(n) e_n`. The matrix is circulant and is filled from one inverse
/// FFT of the symbol table.
pub fn quadrature_matrix(delta_hat: impl Fn(i64) -> C64, n_grid: usize) -> Mat<C64> {
    let col = circulant_column(delta_hat, n_grid);
    Mat::from_fn(n_grid, n_grid, |l, m| col[(l + n_grid - m) % n_grid])
}

/// Generating column of [`quadrature_matrix`]: `Δ[l,m] = col[(l − m) mod N]`.
pub fn circulant_column(delta_hat: impl Fn(i64) -> C64, n_grid: usize) -> Vec<C64> {
    let table: Vec<C64> = (0..n_grid).map(|j| delta_hat(mode_of(j, n_grid))).collect();
    let mut col = inverse(&table);
    let s = 1.0 / n_grid as f64;
    col.iter_mut().for_each(|v| *v *= s);
    col
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_and_index_round_trip() {
        let n = 8;
        let modes: Vec<i64> = band(n).collect();
        assert_eq!(modes, vec![-4, -3, -2, -1, 0, 1, 2, 3]);
        for m in modes {
            assert_eq!(mode_of(fft_index(m, n), n), m);
        }
    }

    #[test]
    fn rho_hat_rejects_out_of_range_order() {
        assert!(rho_hat(0, 1).is_err());
        assert!(rho_hat(5, 1).is_err());
    }

    #[test]
    fn rho_hat_recurrence_holds() {
        for r in 2..=4 {
            for n in -30..30 {
                let lhs = rho_hat(r, n).unwrap();
                let rhs = rho_hat(r - 1, n - 1).unwrap() - rho_hat(r - 1, n).unwrap();
                assert!((lhs - rhs).abs() < 1e-15, "r={r} n={n}");
            }
        }
    }
}
