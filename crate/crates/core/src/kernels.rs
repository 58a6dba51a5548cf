//! Logarithmic splittings of the Helmholtz boundary kernels and their
//! product-integration discretization.
//!
//! Every kernel is written as
//!
//! ```text
//! K(t,τ) = A(t,τ)·(e^{i(t−τ)} − 1)^{j−1}·log(4 sin²((t−τ)/2)) + B(t,τ)
//! ```
//!
//! with `A`, `B` smooth and bi-periodic; the surface measure `η(τ)` is folded
//! into both. The discrete operator is
//! `−4π·A_N ⊙ Δ_N(ρ̂_j) + (2π/N)·B_N`, where `Δ_N` is the product-integration
//! matrix of [`crate::spectral::quadrature_matrix`].
//!
//! Kernels (with `r = |x(t) − x(τ)|`, `d = t − τ`, `e = e^{id} − 1`):
//!
//! * [`KernelKind::V`] (`j = 1`): single layer `(i/4)H₀(kr)η(τ)`;
//! * [`KernelKind::V4`] (`j = 4`): the single layer minus the multiplier parts
//!   `½HD₋₁η` and `(k²/4)Λ₃η³`;
//! * [`KernelKind::KT`] (`j = 3`): adjoint double layer, normal derivative
//!   taken at the target `x(t)`;
//! * [`KernelKind::Vtn`] (`j = 2`): single layer weighted by `t̂(t)·n̂(τ)`;
//! * [`KernelKind::VttRem`] (`j = 3`): single layer weighted by `t̂(t)·t̂(τ)`
//!   minus the multiplier `½HD₋₁η`.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{cross, dot, CurveFrame};
use crate::special::{cylinder, one_minus_j0, EULER_GAMMA};
use crate::spectral::{circulant_column, rho_hat, FourierSymbol};

const I: C64 = C64 { re: 0.0, im: 1.0 };
const FOUR_PI: f64 = 4.0 * PI;

/// The split kernels used by the method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// Single layer.
    V,
    /// Single layer with its two leading multiplier terms removed.
    V4,
    /// Adjoint double layer.
    KT,
    /// Tangential–normal weighted single layer.
    Vtn,
    /// Tangential–tangential weighted single layer minus `½HD₋₁η`.
    VttRem,
}

impl KernelKind {
    /// All kinds, in storage order.
    pub const ALL: [KernelKind; 5] = [KernelKind::V, KernelKind::V4, KernelKind::KT, KernelKind::Vtn, KernelKind::VttRem];

    /// Exponent `j` of the singular factor `(e^{i(t−τ)} − 1)^{j−1} log(4 sin²((t−τ)/2))`.
    pub fn order(self) -> u32 {
        match self {
            KernelKind::V => 1,
            KernelKind::V4 => 4,
            KernelKind::KT => 3,
            KernelKind::Vtn => 2,
            KernelKind::VttRem => 3,
        }
    }

    fn index(self) -> usize {
        match self {
            KernelKind::V => 0,
            KernelKind::V4 => 1,
            KernelKind::KT => 2,
            KernelKind::Vtn => 3,
            KernelKind::VttRem => 4,
        }
    }
}

/// Smooth factors of a split kernel at one point `(t, τ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitValue {
    /// Coefficient of the singular factor.
    pub a: C64,
    /// Smooth remainder.
    pub b: C64,
}

/// `e^{id} − 1`, evaluated as `2i·sin(d/2)·e^{id/2}` to keep full relative
/// accuracy for small `d`.
pub fn expm1_i(d: f64) -> C64 {
    let (s, c) = (0.5 * d).sin_cos();
    C64::new(0.0, 2.0 * s) * C64::new(c, s)
}

/// `(e^{id} − 1)^{j−1}·log(4 sin²(d/2))` for `d ∉ 2πℤ`.
pub fn singular_factor(j: u32, d: f64) -> C64 {
    let e = expm1_i(d);
    let s = (0.5 * d).sin();
    e.powu(j - 1) * (4.0 * s * s).ln()
}

fn check_k(k: f64) -> Result<()> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::Domain(format!("kernel wavenumber must be positive and finite, got {k}")));
    }
    Ok(())
}

/// Off-diagonal values of the kernel each split reconstructs, at target frame
/// `ft` (parameter `t`) and source frame `fs` (parameter `τ`).
pub fn target(kind: KernelKind, k: f64, ft: &CurveFrame, fs: &CurveFrame) -> Result<C64> {
    check_k(k)?;
    let x = [ft.x[0] - fs.x[0], ft.x[1] - fs.x[1]];
    let r = dot(x, x).sqrt();
    if !(r > 0.0) {
        return Err(Error::Domain("target kernel requested at coincident points".into()));
    }
    let d = ft.t - fs.t;
    let l4 = singular_factor(1, d);
    let c = cylinder(k * r);
    let es = fs.eta;
    let v = 0.25 * I * c.h0() * es;
    Ok(match kind {
        KernelKind::V => v,
        KernelKind::V4 => {
            let e = expm1_i(d);
            v + l4 * (es / FOUR_PI) + e * e * l4 * (k * k / (16.0 * PI) * es * es * es)
        }
        KernelKind::KT => -0.25 * I * k * c.h1() * (dot(x, ft.normal) / r) * es,
        KernelKind::Vtn => v * dot(ft.tangent, fs.normal),
        KernelKind::VttRem => v * dot(ft.tangent, fs.tangent) + l4 * (es / FOUR_PI),
    })
}

/// Split factors `(A, B)` of `kind` at `(t, τ)`; the analytic diagonal limits
/// are used when `t − τ ∈ 2πℤ`.
pub fn split(kind: KernelKind, k: f64, ft: &CurveFrame, fs: &CurveFrame) -> Result<SplitValue> {
    check_k(k)?;
    let d = (ft.t - fs.t).rem_euclid(2.0 * PI);
    if d == 0.0 {
        return Ok(diagonal_all(k, ft)[kind.index()]);
    }
    let x = [ft.x[0] - fs.x[0], ft.x[1] - fs.x[1]];
    Ok(split_all(k, ft, fs, ft.t - fs.t, x)[kind.index()])
}

/// As [`split`] off the diagonal, with the chord `x(t) − x(τ)` supplied by the
/// caller (e.g. from [`crate::geometry::Curve::chord`] for nearly coincident points).
pub fn split_with_chord(kind: KernelKind, k: f64, ft: &CurveFrame, fs: &CurveFrame, chord: [f64; 2]) -> Result<SplitValue> {
    check_k(k)?;
    Ok(split_all(k, ft, fs, ft.t - fs.t, chord)[kind.index()])
}

/// Analytic diagonal limits `(A(t,t), B(t,t))` of `kind`.
pub fn diagonal(kind: KernelKind, k: f64, f: &CurveFrame) -> Result<SplitValue> {
    check_k(k)?;
    Ok(diagonal_all(k, f)[kind.index()])
}

fn split_all(k: f64, ft: &CurveFrame, fs: &CurveFrame, d: f64, x: [f64; 2]) -> [SplitValue; 5] {
    let r = dot(x, x).sqrt();
    let z = k * r;
    let c = cylinder(z);
    let es = fs.eta;
    let e = expm1_i(d);
    let e2 = e * e;
    let sh = (0.5 * d).sin();
    let l4 = (4.0 * sh * sh).ln();

    // Single layer.
    let a1 = C64::new(-c.j0 * es / FOUR_PI, 0.0);
    let b1 = 0.25 * I * c.h0() * es - a1 * l4;

    // Single layer minus ½HD₋₁η and (k²/4)Λ₃η³ (cancellation-free numerator).
    let a4 = (C64::new(one_minus_j0(z) / FOUR_PI, 0.0) + e2 * (k * k / (16.0 * PI) * es * es)) * es / (e2 * e);

    // Adjoint double layer.
    let xn = dot(x, ft.normal) / r;
    let cc = k / FOUR_PI * c.j1 * xn * es;
    let kt_target = -0.25 * I * k * c.h1() * xn * es;
    let akt = C64::new(cc, 0.0) / e2;
    let bkt = kt_target - cc * l4;

    // Tangential–normal.
    let tn = dot(ft.tangent, fs.normal);

    // Tangential–tangential remainder; 1 − t̂·t̂ = |t̂(t) − t̂(τ)|²/2.
    let tt = dot(ft.tangent, fs.tangent);
    let dt = [ft.tangent[0] - fs.tangent[0], ft.tangent[1] - fs.tangent[1]];
    let one_minus_tt = 0.5 * dot(dt, dt);
    let att = C64::new(es * (one_minus_j0(z) + c.j0 * one_minus_tt) / FOUR_PI, 0.0) / e2;

    [
        SplitValue { a: a1, b: b1 },
        SplitValue { a: a4, b: b1 },
        SplitValue { a: akt, b: bkt },
        SplitValue { a: a1 * tn / e, b: b1 * tn },
        SplitValue { a: att, b: b1 * tt },
    ]
}

fn diagonal_all(k: f64, f: &CurveFrame) -> [SplitValue; 5] {
    let eta = f.eta;
    let k2 = k * k;
    let cr = cross(f.d1, f.d2);
    let x2n = dot(f.d2, f.normal);
    let bv = eta * (C64::new(-EULER_GAMMA / (2.0 * PI) - (0.5 * k * eta).ln() / (2.0 * PI), 0.25));
    let av = C64::new(-eta / FOUR_PI, 0.0);
    let a4 = C64::new(eta * eta, dot(f.d1, f.d2)) * (eta * k2 / (16.0 * PI));
    let akt = C64::new(k2 / (16.0 * PI) * x2n * eta, 0.0);
    let bkt = C64::new(x2n / (FOUR_PI * eta), 0.0);
    let atn = C64::new(0.0, -cr / (FOUR_PI * eta));
    let q = cr / (eta * eta);
    let att = C64::new(-eta * (0.25 * k2 * eta * eta + 0.5 * q * q) / FOUR_PI, 0.0);
    [
        SplitValue { a: av, b: bv },
        SplitValue { a: a4, b: bv },
        SplitValue { a: akt, b: bkt },
        SplitValue { a: atn, b: C64::new(0.0, 0.0) },
        SplitValue { a: att, b: bv },
    ]
}

/// Discrete operators of all split kernels for one wavenumber on an `N`-point grid.
#[derive(Debug, Clone)]
pub struct DiscreteKernels {
    /// Wavenumber.
    pub k: f64,
    mats: [Mat<C64>; 5],
}

impl DiscreteKernels {
    /// Samples every kernel at all node pairs (rows in parallel) and forms
    /// `−4π·A_N ⊙ Δ_N(ρ̂_j) + (2π/N)·B_N`.
    pub fn assemble(k: f64, frames: &[CurveFrame]) -> Result<Self> {
        check_k(k)?;
        let n = frames.len();
        if n < 4 || n % 2 != 0 {
            return Err(Error::Config(format!("grid size must be even and at least 4, got {n}")));
        }
        let cols: Vec<Vec<C64>> = KernelKind::ALL
            .iter()
            .map(|kind| {
                let j = kind.order();
                circulant_column(|m| C64::new(rho_hat(j, m).expect("orders 1..4 are tabulated"), 0.0), n)
            })
            .collect();
        let w = 2.0 * PI / n as f64;
        let h = 2.0 * PI / n as f64;
        let rows: Vec<Vec<[C64; 5]>> = (0..n)
            .into_par_iter()
            .map(|l| {
                (0..n)
                    .map(|m| {
                        let vals = if l == m {
                            diagonal_all(k, &frames[l])
                        } else {
                            let (a, b) = (&frames[l], &frames[m]);
                            split_all(k, a, b, h * (l as f64 - m as f64), [a.x[0] - b.x[0], a.x[1] - b.x[1]])
                        };
                        let idx = (l + n - m) % n;
                        let mut out = [C64::new(0.0, 0.0); 5];
                        for (q, v) in vals.iter().enumerate() {
                            out[q] = -FOUR_PI * v.a * cols[q][idx] + w * v.b;
                        }
                        out
                    })
                    .collect()
            })
            .collect();
        let mats = std::array::from_fn(|q| Mat::from_fn(n, n, |l, m| rows[l][m][q]));
        for (kind, m) in KernelKind::ALL.iter().zip(mats.iter()) {
            let finite = (0..n).all(|c| m.col(c).iter().all(|v| v.re.is_finite() && v.im.is_finite()));
            if !finite {
                return Err(Error::Numerical(format!("non-finite entries in the {kind:?} kernel (self-intersecting curve?)")));
            }
        }
        Ok(Self { k, mats })
    }

    /// Discrete operator of `kind`.
    pub fn get(&self, kind: KernelKind) -> &Mat<C64> {
        &self.mats[kind.index()]
    }

    /// Grid size.
    pub fn n(&self) -> usize {
        self.mats[0].nrows()
    }
}

/// `r_a(t,τ) = (a(t) − a(τ)) / (a(t)(e^{i(t−τ)} − 1))` with the diagonal limit
/// `−i·a′(t)/a(t)`.
pub fn commutator_kernel(a_t: f64, a_tau: f64, a_prime_t: f64, d: f64) -> Result<C64> {
    if !(a_t.abs() > 0.0) || !(a_tau.abs() > 0.0) {
        return Err(Error::Domain("commutator weight must not vanish".into()));
    }
    if d.rem_euclid(2.0 * PI) == 0.0 {
        return Ok(C64::new(0.0, -a_prime_t / a_t));
    }
    Ok(C64::new(a_t - a_tau, 0.0) / (expm1_i(d) * a_t))
}

/// Discrete commutator `σ − a⁻¹σa` for a smooth positive weight `a` sampled
/// at the nodes (with derivative `a′`).
///
/// Uses `(σ − a⁻¹σa)φ = Σ_n (σ(n−1) − σ(n))·(r_a φ)^(n)·e_n`, discretized as
/// `r_a ⊙ Δ_N(σ(·−1) − σ)`.
pub fn commutator_matrix(sigma: &FourierSymbol, a: &[f64], a_prime: &[f64]) -> Result<Mat<C64>> {
    let n = a.len();
    if a_prime.len() != n {
        return Err(Error::Config("weight and derivative samples differ in length".into()));
    }
    if a.iter().any(|v| !(v.abs() > 0.0)) {
        return Err(Error::Domain("commutator weight must not vanish".into()));
    }
    let col = circulant_column(|m| sigma.at(m - 1) - sigma.at(m), n);
    let h = 2.0 * PI / n as f64;
    let mut out = Mat::<C64>::zeros(n, n);
    for l in 0..n {
        for m in 0..n {
            let r = commutator_kernel(a[l], a[m], a_prime[l], h * (l as f64 - m as f64))?;
            out[(l, m)] = r * col[(l + n - m) % n];
        }
    }
    Ok(out)
}
