//! Dense discrete systems for the regularized combined-field formulation.
//!
//! Unknowns are ordered `[λ_p; λ_s]` (pressure block first); rows are ordered
//! `[normal trace; tangential trace]`. The solution densities are recovered as
//! `(φ_p, φ_s) = R_N(λ_p, λ_s)`.
//!
//! Two realizations are provided:
//!
//! * [`assemble_system_arclength`] for curves parametrized proportionally to
//!   arc length (`η ≡ 1` after normalization to length `2π`): every
//!   multiplier×multiplier product is composed symbol-wise;
//! * [`assemble_system_general`] for arbitrary smooth parametrizations: the
//!   principal part `H_{p,s}` is a constant 2×2 multiplier, and all other terms
//!   are realized with node multiplications by `η^{±1}`, commutators, and the
//!   split kernels.

mod symbols;

use std::io::Write;
use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dot, Curve, CurveFrame, CurveRecord};
use crate::kernels::{commutator_matrix, DiscreteKernels, KernelKind};
use crate::ops::{add_scaled, block2, block_right_apply, Factor, OpSum};
use crate::params::ProblemParams;
use crate::spectral::FourierSymbol;

pub use symbols::{
    a_pp_block, block_at, block_mul, e3_symbol, h0_block, hps_block, hps_constants, hps_eigenvalues, multiplier_block_symbol,
    r_block, single_layer_symbol, y_symbol, BlockName, BlockSymbol,
};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Which discretization of the system is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formulation {
    /// Arc-length formulation (requires unit speed).
    ArcLength,
    /// General-parametrization formulation.
    General,
}

impl Formulation {
    fn code(self) -> u64 {
        match self {
            Formulation::ArcLength => 0,
            Formulation::General => 1,
        }
    }
}

/// An assembled `2N×2N` system together with the operators needed to turn
/// its solution into boundary densities and exterior fields.
#[derive(Debug, Clone)]
pub struct SystemMatrix {
    /// Grid size `N`.
    pub n: usize,
    /// Discretization used.
    pub formulation: Formulation,
    /// Problem parameters the system was assembled with.
    pub params: ProblemParams,
    /// Boundary curve description.
    pub curve: CurveRecord,
    /// Whether the regularizer `R` was applied (otherwise `R = I`).
    pub regularized: bool,
    /// The system matrix.
    pub matrix: Mat<C64>,
    /// Principal multiplier part of `matrix` (the rest is the compact correction).
    pub principal: Mat<C64>,
    /// Regularizer `R_N` (`2N×2N`), identity for the unregularized variant.
    pub regularizer: Mat<C64>,
    /// `Y_{p,N}` (`N×N`).
    pub y_p: Mat<C64>,
    /// `Y_{s,N}` (`N×N`).
    pub y_s: Mat<C64>,
}

impl SystemMatrix {
    /// `matrix − principal`.
    pub fn correction(&self) -> Mat<C64> {
        &self.matrix - &self.principal
    }

    /// Writes the matrix in the binary dump format: a little-endian header
    /// `magic, version, N, formulation (u64); ω, λ, μ, ε_p (f64)` followed by
    /// the entries in row-major order as `(re, im)` pairs of `f64`.
    pub fn write_dump(&self, mut w: impl Write) -> Result<()> {
        w.write_all(&DUMP_MAGIC.to_le_bytes())?;
        w.write_all(&DUMP_VERSION.to_le_bytes())?;
        w.write_all(&(self.n as u64).to_le_bytes())?;
        w.write_all(&self.formulation.code().to_le_bytes())?;
        for v in [self.params.omega, self.params.lambda, self.params.mu, self.params.eps_p] {
            w.write_all(&v.to_le_bytes())?;
        }
        for i in 0..self.matrix.nrows() {
            for j in 0..self.matrix.ncols() {
                let z = self.matrix[(i, j)];
                w.write_all(&z.re.to_le_bytes())?;
                w.write_all(&z.im.to_le_bytes())?;
            }
        }
        Ok(())
    }
}

/// Magic number of the binary dump (`"NAVBIE\0\0"` little-endian).
pub const DUMP_MAGIC: u64 = u64::from_le_bytes(*b"NAVBIE\0\0");
/// Binary dump format version.
pub const DUMP_VERSION: u64 = 1;

fn check_grid(n: usize) -> Result<()> {
    if n < 8 || n % 2 != 0 {
        return Err(Error::Config(format!("N must be even and at least 8, got {n}")));
    }
    Ok(())
}

fn m(s: FourierSymbol) -> Factor {
    Factor::Mult(s)
}

fn dense(a: &Mat<C64>) -> Factor {
    Factor::Dense(Arc::new(a.clone()))
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn symbol_block_matrix(b: &BlockSymbol, n: usize) -> Mat<C64> {
    block2(std::array::from_fn(|i| std::array::from_fn(|j| b[i][j].matrix(n))))
}

fn identity_block(n: usize) -> Mat<C64> {
    Mat::<C64>::identity(2 * n, 2 * n)
}

fn finite(mat: &Mat<C64>) -> Result<()> {
    for j in 0..mat.ncols() {
        for i in 0..mat.nrows() {
            let v = mat[(i, j)];
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::Numerical(format!("non-finite system entry at ({i}, {j})")));
            }
        }
    }
    Ok(())
}

/// Assembles the arc-length system `A_pp R + K_N R` on an `N`-point grid.
///
/// `regularized = false` yields the combined-field operator itself (`R = I`).
pub fn assemble_system_arclength(params: &ProblemParams, curve: &Curve, n: usize, regularized: bool) -> Result<SystemMatrix> {
    check_grid(n)?;
    let frames = curve.node_frames(n)?;
    let worst = frames.iter().map(|f| (f.eta - 1.0).abs()).fold(0.0, f64::max);
    if worst > 1e-8 {
        return Err(Error::Precondition(format!(
            "arc-length formulation needs unit speed; max |η − 1| = {worst:e} on '{}' (resample by arc length and normalize the length to 2π)",
            curve.name()
        )));
    }
    let (kp, ks) = (DiscreteKernels::assemble(params.k_p, &frames)?, DiscreteKernels::assemble(params.k_s, &frames)?);
    let d = || m(FourierSymbol::deriv(1));
    let (yp, ys) = (y_symbol(params.kt_p()), y_symbol(params.kt_s()));
    let (kp2, ks2) = (params.k_p * params.k_p, params.k_s * params.k_s);

    let k11 = OpSum::chain(1.0, vec![d(), dense(kp.get(KernelKind::V4)), d()])
        .add(kp2, vec![dense(kp.get(KernelKind::VttRem))])
        .add(-1.0, vec![dense(kp.get(KernelKind::KT)), m(yp.clone())]);
    let k12 = OpSum::chain(ks2, vec![dense(ks.get(KernelKind::Vtn))])
        .add(-1.0, vec![dense(ks.get(KernelKind::KT)), d()])
        .add(-1.0, vec![d(), dense(ks.get(KernelKind::V4)), m(ys.clone())]);
    let k21 = OpSum::chain(kp2, vec![dense(kp.get(KernelKind::Vtn))])
        .add(-1.0, vec![dense(kp.get(KernelKind::KT)), d()])
        .add(-1.0, vec![d(), dense(kp.get(KernelKind::V4)), m(yp.clone())]);
    let k22 = OpSum::chain(-1.0, vec![d(), dense(ks.get(KernelKind::V4)), d()])
        .add(-ks2, vec![dense(ks.get(KernelKind::VttRem))])
        .add(1.0, vec![dense(ks.get(KernelKind::KT)), m(ys.clone())]);
    let kernel = block2([[k11.to_matrix(n), k12.to_matrix(n)], [k21.to_matrix(n), k22.to_matrix(n)]]);

    let app = a_pp_block(params);
    let (matrix, principal, regularizer) = if regularized {
        let r = r_block(params);
        let principal = symbol_block_matrix(&block_mul(&app, &r), n);
        let r_ops: [[OpSum; 2]; 2] = std::array::from_fn(|i| std::array::from_fn(|j| OpSum::chain(1.0, vec![m(r[i][j].clone())])));
        let mut matrix = block_right_apply(&kernel, &r_ops);
        add_scaled(&mut matrix, c(1.0), &principal);
        (matrix, principal, symbol_block_matrix(&r, n))
    } else {
        let principal = symbol_block_matrix(&app, n);
        let mut matrix = kernel;
        add_scaled(&mut matrix, c(1.0), &principal);
        (matrix, principal, identity_block(n))
    };
    finite(&matrix)?;
    Ok(SystemMatrix {
        n,
        formulation: Formulation::ArcLength,
        params: *params,
        curve: curve.record(),
        regularized,
        matrix,
        principal,
        regularizer,
        y_p: yp.matrix(n),
        y_s: ys.matrix(n),
    })
}

/// Node-level ingredients of the general formulation.
struct General {
    eta: Vec<f64>,
    eta_prime: Vec<f64>,
    cinf: Factor,
    c2: Factor,
    c3: Factor,
    cinf_inv: Factor,
}

impl General {
    fn new(frames: &[CurveFrame]) -> Result<Self> {
        let eta: Vec<f64> = frames.iter().map(|f| f.eta).collect();
        let eta_prime: Vec<f64> = frames.iter().map(|f| f.eta_prime()).collect();
        let inv: Vec<f64> = eta.iter().map(|e| 1.0 / e).collect();
        let inv_prime: Vec<f64> = eta.iter().zip(&eta_prime).map(|(e, ep)| -ep / (e * e)).collect();
        let hdm2 = FourierSymbol::hd(-2);
        Ok(Self {
            cinf: dense(&commutator_matrix(&FourierSymbol::hilbert(), &eta, &eta_prime)?),
            c2: dense(&commutator_matrix(&FourierSymbol::hd(-1), &eta, &eta_prime)?),
            c3: dense(&commutator_matrix(&hdm2, &eta, &eta_prime)?),
            cinf_inv: dense(&commutator_matrix(&FourierSymbol::hilbert(), &inv, &inv_prime)?),
            eta,
            eta_prime,
        })
    }

    fn pow(&self, p: i32) -> Factor {
        Factor::diag_real(&self.eta.iter().map(|e| e.powi(p)).collect::<Vec<_>>())
    }
    fn e(&self) -> Factor {
        self.pow(1)
    }
    fn ei(&self) -> Factor {
        self.pow(-1)
    }
    fn eta_prime(&self) -> Factor {
        Factor::diag_real(&self.eta_prime)
    }
    fn eta2_prime(&self) -> Factor {
        Factor::diag_real(&self.eta.iter().zip(&self.eta_prime).map(|(e, p)| 2.0 * e * p).collect::<Vec<_>>())
    }

    /// `Y̌ = η⁻¹HD + (k̃²/2)HD₋₁η + η⁻¹J`.
    fn y(&self, kt: C64) -> OpSum {
        OpSum::chain(1.0, vec![self.ei(), m(FourierSymbol::hd(1))])
            .add(kt * kt * 0.5, vec![m(FourierSymbol::hd(-1)), self.e()])
            .add(1.0, vec![self.ei(), m(FourierSymbol::mean())])
    }

    /// `Ř = η⁻¹H₀HD + ½diag(k̃_s², −k̃_p²)HD₋₁η + diag(J, J)η`.
    fn r(&self, p: &ProblemParams) -> [[OpSum; 2]; 2] {
        let (ks2, kp2) = (p.kt_s() * p.kt_s(), p.kt_p() * p.kt_p());
        let hd = || m(FourierSymbol::hd(1));
        let jeta = || vec![m(FourierSymbol::mean()), self.e()];
        let off = OpSum::chain(1.0, vec![self.ei(), m(FourierSymbol::deriv(1))]);
        [
            [
                OpSum::chain(1.0, vec![self.ei(), hd()]).add(ks2 * 0.5, vec![m(FourierSymbol::hd(-1)), self.e()]).add(1.0, jeta()),
                off.clone(),
            ],
            [
                off,
                OpSum::chain(-1.0, vec![self.ei(), hd()]).add(-kp2 * 0.5, vec![m(FourierSymbol::hd(-1)), self.e()]).add(1.0, jeta()),
            ],
        ]
    }

    /// Order-(−2) remainder of the hypersingular operator, `W̌ − ½η⁻¹HD − (k²/4)HD₋₁η`.
    fn w2(&self, k: f64, dk: &DiscreteKernels) -> OpSum {
        let k2 = k * k;
        let d = || m(FourierSymbol::deriv(1));
        OpSum::chain(0.25 * k2, vec![self.c2.clone(), self.e()])
            .add(0.25 * k2, vec![self.ei(), m(FourierSymbol::hd(-2)), self.eta2_prime()])
            .add(0.25 * k2, vec![self.ei(), d(), m(e3_symbol()), self.pow(2), d()])
            .add(1.0, vec![self.ei(), d(), dense(dk.get(KernelKind::V4)), self.ei(), d()])
            .add(k2, vec![dense(dk.get(KernelKind::VttRem))])
    }

    /// Smoothing part of the single layer, `V̌⁽⁴⁾ = (k²/4)E₃η³ + Ṽ⁽⁴⁾`.
    fn v4(&self, k: f64, dk: &DiscreteKernels) -> OpSum {
        OpSum::chain(0.25 * k * k, vec![m(e3_symbol()), self.pow(3)]).add(1.0, vec![dense(dk.get(KernelKind::V4))])
    }

    /// Off-diagonal block of `Ǎ⁽²⁾_pp` for wavenumber pair `(k, k̃)` (the `s`
    /// pair in block (1,2), the `p` pair in block (2,1)).
    fn a2pp_off(&self, k: f64, kt: C64) -> OpSum {
        let (k2, kt2) = (k * k, kt * kt);
        OpSum::chain(I, vec![self.ei(), m(FourierSymbol::mean())])
            .add(kt2 * 0.25, vec![self.cinf.clone(), m(FourierSymbol::hd(-1)), self.e()])
            .add(0.25 * k2, vec![m(FourierSymbol::deriv(-2)), self.eta_prime()])
            .add(0.25 * k2, vec![m(FourierSymbol::hd(-2)), self.e(), self.cinf.clone(), m(FourierSymbol::deriv(1))])
            .add(-0.25 * k2, vec![self.c3.clone(), self.e(), m(FourierSymbol::hd(1))])
            .add(I * kt2 * 0.25, vec![self.ei(), m(FourierSymbol::mean()), self.e(), m(FourierSymbol::hd(-1)), self.e()])
            .add(kt2 * (k2 / 8.0), vec![self.ei(), m(FourierSymbol::hd(-2)), self.pow(3), m(FourierSymbol::hd(-1)), self.e()])
            .add(0.25 * k2, vec![self.ei(), m(FourierSymbol::hd(-2)), self.pow(2), m(FourierSymbol::mean())])
    }

    /// Off-diagonal block of `Ǎ⁽²⁾_comb` for wavenumber `k` (column density of that wavenumber).
    fn a2comb_off(&self, k: f64, kt: C64, dk: &DiscreteKernels) -> OpSum {
        let dcheck = OpSum::chain(1.0, vec![self.ei(), m(FourierSymbol::deriv(1))]);
        let dv4y = dcheck.then(&self.v4(k, dk)).then(&self.y(kt));
        OpSum::chain(k * k, vec![dense(dk.get(KernelKind::Vtn))])
            .add(-1.0, vec![dense(dk.get(KernelKind::KT)), self.ei(), m(FourierSymbol::deriv(1))])
            .plus(-1.0, &dv4y)
    }
}

/// Assembles the general-parametrization system
/// `H_{p,s} + T₅ + A^∞ + (Ǎ⁽²⁾_pp + Ǎ⁽²⁾_comb)·Ř` on an `N`-point grid.
///
/// `regularized = false` yields the combined-field operator discretized
/// directly (`R = I`), see [`assemble_combined_direct`].
pub fn assemble_system_general(params: &ProblemParams, curve: &Curve, n: usize, regularized: bool) -> Result<SystemMatrix> {
    check_grid(n)?;
    let frames = curve.node_frames(n)?;
    let (kp, ks) = (DiscreteKernels::assemble(params.k_p, &frames)?, DiscreteKernels::assemble(params.k_s, &frames)?);
    let g = General::new(&frames)?;
    let (yp, ys) = (g.y(params.kt_p()), g.y(params.kt_s()));
    if !regularized {
        let matrix = combined_direct(params, &frames, &kp, &ks)?;
        let principal = symbol_block_matrix(&a_pp_block(params), n);
        return Ok(SystemMatrix {
            n,
            formulation: Formulation::General,
            params: *params,
            curve: curve.record(),
            regularized,
            matrix,
            principal,
            regularizer: identity_block(n),
            y_p: yp.to_matrix(n),
            y_s: ys.to_matrix(n),
        });
    }

    let (kp2, ks2) = (c(params.k_p * params.k_p), c(params.k_s * params.k_s));
    let (ktp2, kts2) = (params.kt_p() * params.kt_p(), params.kt_s() * params.kt_s());
    let (a, b, cc, d) = (kp2 + ktp2, ks2 - kts2, kp2 - ktp2, -(ks2 + kts2));
    let h = || m(FourierSymbol::hilbert());
    let hd = || m(FourierSymbol::hd(1));
    let hdm1 = || m(FourierSymbol::hd(-1));
    let dd = || m(FourierSymbol::deriv(1));
    let j = || m(FourierSymbol::mean());
    let zero = OpSum::zero;

    // T₅ = (1/8)[[k̃_s²a, −k̃_p²bH], [k̃_s²cH, −k̃_p²d]]·(HD₋₁η)².
    let sq = vec![hdm1(), g.e(), hdm1(), g.e()];
    let with_h = |mut v: Vec<Factor>| {
        v.insert(0, h());
        v
    };
    let mut t: [[OpSum; 2]; 2] = [
        [OpSum::chain(kts2 * a / 8.0, sq.clone()), OpSum::chain(-ktp2 * b / 8.0, with_h(sq.clone()))],
        [OpSum::chain(kts2 * cc / 8.0, with_h(sq.clone())), OpSum::chain(-ktp2 * d / 8.0, sq.clone())],
    ];

    // T1a = η⁻¹HDη⁻¹C^∞_{1/η}·[[D, −HD], [HD, D]].
    let q = vec![g.ei(), hd(), g.ei(), g.cinf_inv.clone()];
    let tail = |f: Factor| {
        let mut v = q.clone();
        v.push(f);
        v
    };
    let t1a = [[(1.0, tail(dd())), (-1.0, tail(hd()))], [(1.0, tail(hd())), (1.0, tail(dd()))]];
    // T1b = η⁻¹H₀J·η⁻¹·H₀HD with H₀J = S⊗J, S = [[1, −i], [−i, −1]], H₀HD = [[HD, D], [D, −HD]].
    let s = [[c(1.0), -I], [-I, c(-1.0)]];
    let x: [[(f64, fn() -> FourierSymbol); 2]; 2] =
        [[(1.0, || FourierSymbol::hd(1)), (1.0, || FourierSymbol::deriv(1))], [(1.0, || FourierSymbol::deriv(1)), (-1.0, || FourierSymbol::hd(1))]];
    // T2J (½η⁻¹[[k̃_s², ik̃_p²], [−ik̃_s², k̃_p²]]Jη), T3 (η⁻¹SJη), T4J (¼[[a+b, −i(a+b)], [i(c−d), c−d]]J).
    let t2 = [[kts2 * 0.5, I * ktp2 * 0.5], [-I * kts2 * 0.5, ktp2 * 0.5]];
    let t4 = [[(a + b) * 0.25, -I * (a + b) * 0.25], [I * (cc - d) * 0.25, (cc - d) * 0.25]];
    // T6 = ¼M₁HD₋₁ηJη with M₁ = [[a, bH], [cH, d]].
    let t6 = [[(a * 0.25, false), (b * 0.25, true)], [(cc * 0.25, true), (d * 0.25, false)]];
    for bi in 0..2 {
        for bj in 0..2 {
            let mut acc = std::mem::take(&mut t[bi][bj]);
            acc = acc.add(t1a[bi][bj].0, t1a[bi][bj].1.clone());
            for l in 0..2 {
                let (sgn, sym) = x[l][bj];
                acc = acc.add(s[bi][l] * sgn, vec![g.ei(), j(), g.ei(), m(sym())]);
            }
            acc = acc.add(s[bi][bj] + t2[bi][bj], vec![g.ei(), j(), g.e()]);
            acc = acc.add(t4[bi][bj], vec![j()]);
            let mut t6f = vec![hdm1(), g.e(), j(), g.e()];
            if t6[bi][bj].1 {
                t6f.insert(0, h());
            }
            acc = acc.add(t6[bi][bj].0, t6f);
            t[bi][bj] = acc;
        }
    }
    t[0][1] = std::mem::take(&mut t[0][1]).add(ktp2 * 0.5, vec![g.cinf.clone()]);
    t[1][0] = std::mem::take(&mut t[1][0]).add(-kts2 * 0.5, vec![g.cinf.clone()]);

    // Ǎ⁽²⁾ = Ǎ⁽²⁾_pp + Ǎ⁽²⁾_comb.
    let half_j = OpSum::chain(0.5, vec![g.ei(), j()]);
    let a2: [[OpSum; 2]; 2] = [
        [
            zero().plus(-1.0, &half_j).plus(1.0, &g.w2(params.k_p, &kp)).plus(-1.0, &OpSum::chain(1.0, vec![dense(kp.get(KernelKind::KT))]).then(&yp)),
            g.a2pp_off(params.k_s, params.kt_s()).plus(1.0, &g.a2comb_off(params.k_s, params.kt_s(), &ks)),
        ],
        [
            g.a2pp_off(params.k_p, params.kt_p()).plus(1.0, &g.a2comb_off(params.k_p, params.kt_p(), &kp)),
            zero().plus(1.0, &half_j).plus(-1.0, &g.w2(params.k_s, &ks)).plus(1.0, &OpSum::chain(1.0, vec![dense(ks.get(KernelKind::KT))]).then(&ys)),
        ],
    ];
    let a2m = block2(std::array::from_fn(|i| std::array::from_fn(|jj| a2[i][jj].to_matrix(n))));
    let r = g.r(params);
    let mut matrix = block_right_apply(&a2m, &r);
    let principal = symbol_block_matrix(&hps_block(params), n);
    add_scaled(&mut matrix, c(1.0), &principal);
    add_scaled(&mut matrix, c(1.0), &block2(std::array::from_fn(|i| std::array::from_fn(|jj| t[i][jj].to_matrix(n)))));
    finite(&matrix)?;
    let regularizer = block2(std::array::from_fn(|i| std::array::from_fn(|jj| r[i][jj].to_matrix(n))));
    Ok(SystemMatrix {
        n,
        formulation: Formulation::General,
        params: *params,
        curve: curve.record(),
        regularized,
        matrix,
        principal,
        regularizer,
        y_p: yp.to_matrix(n),
        y_s: ys.to_matrix(n),
    })
}

/// The combined-field operator `A_DL − A_SL·diag(Y̌_p, Y̌_s)` discretized
/// directly: single layers with the `j = 1` splitting, the hypersingular
/// operator through `W̌ = η⁻¹D V̌ η⁻¹D + k²V̌_tt`, and no regularizer.
pub fn assemble_combined_direct(params: &ProblemParams, curve: &Curve, n: usize) -> Result<Mat<C64>> {
    check_grid(n)?;
    let frames = curve.node_frames(n)?;
    let (kp, ks) = (DiscreteKernels::assemble(params.k_p, &frames)?, DiscreteKernels::assemble(params.k_s, &frames)?);
    combined_direct(params, &frames, &kp, &ks)
}

fn combined_direct(params: &ProblemParams, frames: &[CurveFrame], kp: &DiscreteKernels, ks: &DiscreteKernels) -> Result<Mat<C64>> {
    let n = frames.len();
    let g = General::new(frames)?;
    let tt = Mat::from_fn(n, n, |l, mm| c(dot(frames[l].tangent, frames[mm].tangent)));
    let vtt = |dk: &DiscreteKernels| Mat::from_fn(n, n, |l, mm| dk.get(KernelKind::V)[(l, mm)] * tt[(l, mm)]);
    let dcheck = || vec![g.ei(), m(FourierSymbol::deriv(1))];
    let w = |k: f64, dk: &DiscreteKernels| {
        let mut f = dcheck();
        f.push(dense(dk.get(KernelKind::V)));
        f.extend(dcheck());
        OpSum::chain(1.0, f).add(k * k, vec![dense(&vtt(dk))])
    };
    let kt = |dk: &DiscreteKernels| OpSum::chain(1.0, vec![dense(dk.get(KernelKind::KT))]);
    let g_op = |k: f64, dk: &DiscreteKernels| {
        let mut f = vec![dense(dk.get(KernelKind::KT))];
        f.extend(dcheck());
        OpSum::chain(k * k, vec![dense(dk.get(KernelKind::Vtn))]).add(-1.0, f)
    };
    let dv = |dk: &DiscreteKernels| {
        let mut f = dcheck();
        f.push(dense(dk.get(KernelKind::V)));
        OpSum::chain(1.0, f)
    };
    let half_d = OpSum::chain(0.5, dcheck());
    let (yp, ys) = (g.y(params.kt_p()), g.y(params.kt_s()));
    let (k_p, k_s) = (params.k_p, params.k_s);
    let blocks = [
        [
            w(k_p, kp).plus(-1.0, &OpSum::chain(-0.5, vec![]).plus(1.0, &kt(kp)).then(&yp)),
            half_d.clone().plus(1.0, &g_op(k_s, ks)).plus(-1.0, &dv(ks).then(&ys)),
        ],
        [
            half_d.plus(1.0, &g_op(k_p, kp)).plus(-1.0, &dv(kp).then(&yp)),
            OpSum::zero().plus(-1.0, &w(k_s, ks)).plus(-1.0, &OpSum::chain(0.5, vec![]).plus(-1.0, &kt(ks)).then(&ys)),
        ],
    ];
    let mat = block2(std::array::from_fn(|i| std::array::from_fn(|j| blocks[i][j].to_matrix(n))));
    finite(&mat)?;
    Ok(mat)
}
