//! Closed-form Fourier symbols of the scalar and 2×2 multiplier blocks.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::params::ProblemParams;
use crate::spectral::{rho_hat, FourierSymbol};

/// A 2×2 block of Fourier multipliers (row-major).
pub type BlockSymbol = [[FourierSymbol; 2]; 2];

/// Symbol `−|n| + k̃²/(2|n|)` (`n ≠ 0`), `1` (`n = 0`) of `Y = HD + (k̃²/2)HD₋₁ + J`.
pub fn y_symbol(kt: C64) -> FourierSymbol {
    FourierSymbol::hd(1) + (kt * kt * 0.5) * FourierSymbol::hd(-1) + FourierSymbol::mean()
}

/// `E₃ = Λ₃ + HD₋₃`: symbol `ρ̂₃(n) − 1/|n|³` (`n ≠ 0`), `ρ̂₃(0)` at `n = 0`.
pub fn e3_symbol() -> FourierSymbol {
    FourierSymbol::from_fn(|n| {
        let r = rho_hat(3, n).expect("order 3 is tabulated");
        if n == 0 {
            C64::new(r, 0.0)
        } else {
            C64::new(r - 1.0 / (n.unsigned_abs() as f64).powi(3), 0.0)
        }
    })
}

/// Principal single-layer symbol on arc-length curves: `½HD₋₁ + (k²/4)Λ₃`.
pub fn single_layer_symbol(k: f64) -> FourierSymbol {
    0.5 * FourierSymbol::hd(-1) + (0.25 * k * k) * FourierSymbol::lambda(3).expect("order 3 is tabulated")
}

/// `H₀ = [[1, −H], [−H, −1]]`.
pub fn h0_block() -> BlockSymbol {
    let h = FourierSymbol::hilbert();
    [[FourierSymbol::identity(), -h.clone()], [-h, -FourierSymbol::identity()]]
}

/// Arc-length regularizer `R = H₀HD + ½diag(k̃_s², −k̃_p²)HD₋₁ + diag(J, J)`.
pub fn r_block(p: &ProblemParams) -> BlockSymbol {
    let (ks2, kp2) = (p.kt_s() * p.kt_s(), p.kt_p() * p.kt_p());
    let hd = FourierSymbol::hd(1);
    let hdm1 = FourierSymbol::hd(-1);
    let j = FourierSymbol::mean();
    let off = -(FourierSymbol::hilbert() * hd.clone());
    [
        [hd.clone() + (ks2 * 0.5) * hdm1.clone() + j.clone(), off.clone()],
        [off, -hd + (-kp2 * 0.5) * hdm1 + j],
    ]
}

/// Constants `(Σ, Δ)` of `H_{p,s} = −¼[[Σ, −ΔH], [ΔH, Σ]]`.
pub fn hps_constants(p: &ProblemParams) -> (C64, C64) {
    let (kp2, ks2) = (C64::new(p.k_p * p.k_p, 0.0), C64::new(p.k_s * p.k_s, 0.0));
    let (ktp2, kts2) = (p.kt_p() * p.kt_p(), p.kt_s() * p.kt_s());
    (kp2 + ks2 + ktp2 + kts2, kp2 + ks2 - ktp2 - kts2)
}

/// Principal part `H_{p,s}` of the regularized operator.
pub fn hps_block(p: &ProblemParams) -> BlockSymbol {
    let (sigma, delta) = hps_constants(p);
    let h = FourierSymbol::hilbert();
    [
        [FourierSymbol::constant(-sigma * 0.25), (delta * 0.25) * h.clone()],
        [(-delta * 0.25) * h, FourierSymbol::constant(-sigma * 0.25)],
    ]
}

/// The two eigenvalues `−(k_p² + k_s²)/2` and `−(k̃_p² + k̃_s²)/2` of `H_{p,s}`.
pub fn hps_eigenvalues(p: &ProblemParams) -> [C64; 2] {
    [
        C64::new(-(p.k_p * p.k_p + p.k_s * p.k_s) * 0.5, 0.0),
        -(p.kt_p() * p.kt_p() + p.kt_s() * p.kt_s()) * 0.5,
    ]
}

/// Multiplier part of the combined operator on arc-length curves,
/// `A_pp = [[DS_pD + ½k_p²HD₋₁ + ½Y_p, ½D − DS_sY_s], [½D − DS_pY_p, −DS_sD − ½k_s²HD₋₁ − ½Y_s]]`,
/// with `S_k = ½HD₋₁ + (k²/4)Λ₃` the principal single-layer symbol.
pub fn a_pp_block(p: &ProblemParams) -> BlockSymbol {
    let d = FourierSymbol::deriv(1);
    let hdm1 = FourierSymbol::hd(-1);
    let (sp, ss) = (single_layer_symbol(p.k_p), single_layer_symbol(p.k_s));
    let (yp, ys) = (y_symbol(p.kt_p()), y_symbol(p.kt_s()));
    let half_d = 0.5 * d.clone();
    [
        [
            d.clone() * sp.clone() * d.clone() + (0.5 * p.k_p * p.k_p) * hdm1.clone() + 0.5 * yp.clone(),
            half_d.clone() - d.clone() * ss.clone() * ys.clone(),
        ],
        [half_d - d.clone() * sp * yp, -(d.clone() * ss * d) + (-0.5 * p.k_s * p.k_s) * hdm1 + (-0.5) * ys],
    ]
}

/// Product of two 2×2 multiplier blocks.
pub fn block_mul(a: &BlockSymbol, b: &BlockSymbol) -> BlockSymbol {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][0].clone() * b[0][j].clone() + a[i][1].clone() * b[1][j].clone()))
}

/// Evaluates a block at mode `n`.
pub fn block_at(b: &BlockSymbol, n: i64) -> [[C64; 2]; 2] {
    std::array::from_fn(|i| std::array::from_fn(|j| b[i][j].at(n)))
}

/// Named multiplier blocks exposed for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockName {
    /// `H₀`.
    H0,
    /// `H_{p,s}`.
    Hps,
    /// Multiplier part of the combined operator (arc-length).
    AppMinus1,
    /// `A_pp·R − H_{p,s}`, the order-(−2) remainder of the regularized principal part (arc-length).
    App2,
    /// `Y_p` on the diagonal and `Y_s` on the second diagonal entry.
    Y,
    /// Regularizer `R`.
    R,
}

impl std::str::FromStr for BlockName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "H0" => BlockName::H0,
            "Hps" => BlockName::Hps,
            "App_minus1" => BlockName::AppMinus1,
            "App_2" => BlockName::App2,
            "Y" => BlockName::Y,
            "R" => BlockName::R,
            other => return Err(Error::Config(format!("unknown multiplier block '{other}' (valid: H0, Hps, App_minus1, App_2, Y, R)"))),
        })
    }
}

/// Closed-form value of a named 2×2 multiplier block at mode `n`.
pub fn multiplier_block_symbol(name: BlockName, n: i64, p: &ProblemParams) -> [[C64; 2]; 2] {
    let zero = FourierSymbol::constant(C64::new(0.0, 0.0));
    let block = match name {
        BlockName::H0 => h0_block(),
        BlockName::Hps => hps_block(p),
        BlockName::AppMinus1 => a_pp_block(p),
        BlockName::App2 => {
            let ar = block_mul(&a_pp_block(p), &r_block(p));
            let h = hps_block(p);
            std::array::from_fn(|i| std::array::from_fn(|j| ar[i][j].clone() - h[i][j].clone()))
        }
        BlockName::Y => [[y_symbol(p.kt_p()), zero.clone()], [zero, y_symbol(p.kt_s())]],
        BlockName::R => r_block(p),
    };
    block_at(&block, n)
}
