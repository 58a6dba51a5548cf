//! Dense realizations of operator products built from node-diagonal
//! multiplications, Fourier multipliers and dense matrices.
//!
//! A Fourier multiplier is applied to a dense matrix with FFTs along columns
//! (from the left) or rows (from the right), so chains such as
//! `η⁻¹·HD·η⁻¹·C·D` cost `O(N² log N)` per multiplier instead of a dense product.

use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::spectral::{mode_of, quadrature_matrix, FourierSymbol};

/// One factor of an operator chain.
#[derive(Clone)]
pub enum Factor {
    /// Pointwise multiplication by node values.
    Diag(Arc<Vec<C64>>),
    /// Fourier multiplier (exact on the band).
    Mult(FourierSymbol),
    /// Arbitrary dense `N×N` matrix.
    Dense(Arc<Mat<C64>>),
}

impl Factor {
    /// Pointwise multiplication by real node values.
    pub fn diag_real(v: &[f64]) -> Factor {
        Factor::Diag(Arc::new(v.iter().map(|&x| C64::new(x, 0.0)).collect()))
    }
}

/// `coef·F₁·F₂·…·F_k`.
#[derive(Clone)]
pub struct Chain {
    coef: C64,
    factors: Vec<Factor>,
}

/// Sum of chains acting on `N`-point grid functions.
#[derive(Clone, Default)]
pub struct OpSum {
    terms: Vec<Chain>,
}

impl OpSum {
    /// The zero operator.
    pub fn zero() -> Self {
        Self::default()
    }

    /// A single chain.
    pub fn chain(coef: impl Into<C64>, factors: Vec<Factor>) -> Self {
        Self { terms: vec![Chain { coef: coef.into(), factors }] }
    }

    /// Adds `coef·F₁⋯F_k`.
    pub fn add(mut self, coef: impl Into<C64>, factors: Vec<Factor>) -> Self {
        self.terms.push(Chain { coef: coef.into(), factors });
        self
    }

    /// Appends all terms of `other` (scaled by `s`).
    pub fn plus(mut self, s: impl Into<C64>, other: &OpSum) -> Self {
        let s = s.into();
        for c in &other.terms {
            self.terms.push(Chain { coef: c.coef * s, factors: c.factors.clone() });
        }
        self
    }

    /// Composition `self ∘ other` (distributes over both sums).
    pub fn then(&self, other: &OpSum) -> OpSum {
        let mut out = OpSum::zero();
        for a in &self.terms {
            for b in &other.terms {
                let mut f = a.factors.clone();
                f.extend(b.factors.iter().cloned());
                out.terms.push(Chain { coef: a.coef * b.coef, factors: f });
            }
        }
        out
    }

    /// Dense `N×N` matrix of the operator.
    pub fn to_matrix(&self, n: usize) -> Mat<C64> {
        let mut acc = Mat::<C64>::zeros(n, n);
        let mut ws = Workspace::new(n);
        for c in &self.terms {
            let m = chain_matrix(&c.factors, n, &mut ws);
            add_scaled(&mut acc, c.coef, &m);
        }
        acc
    }

    /// `m · self` for a dense `m` with `N` columns.
    pub fn right_apply(&self, m: &Mat<C64>) -> Mat<C64> {
        let n = m.ncols();
        let mut acc = Mat::<C64>::zeros(m.nrows(), n);
        let mut ws = Workspace::new(n);
        for c in &self.terms {
            let mut x = m.clone();
            for f in &c.factors {
                x = right_factor(&x, f, &mut ws);
            }
            add_scaled(&mut acc, c.coef, &x);
        }
        acc
    }
}

/// `acc += s·m`.
pub fn add_scaled(acc: &mut Mat<C64>, s: C64, m: &Mat<C64>) {
    for j in 0..acc.ncols() {
        for i in 0..acc.nrows() {
            acc[(i, j)] += s * m[(i, j)];
        }
    }
}

struct Workspace {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    buf: Vec<C64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        let mut p = FftPlanner::new();
        Self { fwd: p.plan_fft_forward(n), inv: p.plan_fft_inverse(n), buf: vec![C64::new(0.0, 0.0); n] }
    }

    /// In-place multiplier application to `buf` with symbol table in FFT order.
    fn apply(&mut self, table: &[C64]) {
        let n = self.buf.len();
        self.fwd.process(&mut self.buf);
        let s = 1.0 / n as f64;
        for (v, t) in self.buf.iter_mut().zip(table) {
            *v *= t * s;
        }
        self.inv.process(&mut self.buf);
    }
}

fn chain_matrix(factors: &[Factor], n: usize, ws: &mut Workspace) -> Mat<C64> {
    // Start from the leftmost dense factor (or the leftmost multiplier) so that
    // only dense×dense steps cost a full matrix product.
    let start = factors.iter().position(|f| matches!(f, Factor::Dense(_)));
    let (mut x, first) = match start {
        Some(i) => match &factors[i] {
            Factor::Dense(m) => ((**m).clone(), i),
            _ => unreachable!(),
        },
        None => match factors.iter().position(|f| matches!(f, Factor::Mult(_))) {
            Some(i) => match &factors[i] {
                Factor::Mult(s) => (quadrature_matrix(|k| s.at(k), n), i),
                _ => unreachable!(),
            },
            None => {
                let mut d = Mat::<C64>::identity(n, n);
                for f in factors {
                    d = right_factor(&d, f, ws);
                }
                return d;
            }
        },
    };
    for f in factors[..first].iter().rev() {
        x = left_factor(f, &x, ws);
    }
    for f in &factors[first + 1..] {
        x = right_factor(&x, f, ws);
    }
    x
}

fn table(s: &FourierSymbol, n: usize) -> Vec<C64> {
    (0..n).map(|j| s.at(mode_of(j, n))).collect()
}

fn left_factor(f: &Factor, m: &Mat<C64>, ws: &mut Workspace) -> Mat<C64> {
    match f {
        Factor::Diag(d) => Mat::from_fn(m.nrows(), m.ncols(), |i, j| d[i] * m[(i, j)]),
        Factor::Dense(a) => &**a * m,
        Factor::Mult(s) => {
            let n = m.nrows();
            let t = table(s, n);
            let mut out = Mat::<C64>::zeros(n, m.ncols());
            for j in 0..m.ncols() {
                for i in 0..n {
                    ws.buf[i] = m[(i, j)];
                }
                ws.apply(&t);
                for i in 0..n {
                    out[(i, j)] = ws.buf[i];
                }
            }
            out
        }
    }
}

fn right_factor(m: &Mat<C64>, f: &Factor, ws: &mut Workspace) -> Mat<C64> {
    match f {
        Factor::Diag(d) => Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * d[j]),
        Factor::Dense(a) => m * &**a,
        Factor::Mult(s) => {
            // Row vector times circulant: the transpose has the index-reversed symbol table.
            let n = m.ncols();
            let t0 = table(s, n);
            let t: Vec<C64> = (0..n).map(|j| t0[(n - j) % n]).collect();
            let mut out = Mat::<C64>::zeros(m.nrows(), n);
            for i in 0..m.nrows() {
                for j in 0..n {
                    ws.buf[j] = m[(i, j)];
                }
                ws.apply(&t);
                for j in 0..n {
                    out[(i, j)] = ws.buf[j];
                }
            }
            out
        }
    }
}

/// Assembles a `2N×2N` matrix from four `N×N` blocks.
pub fn block2(b: [[Mat<C64>; 2]; 2]) -> Mat<C64> {
    let n = b[0][0].nrows();
    Mat::from_fn(2 * n, 2 * n, |i, j| b[i / n][j / n][(i % n, j % n)])
}

/// Extracts block `(bi, bj)` of a `2N×2N` matrix.
pub fn sub_block(m: &Mat<C64>, bi: usize, bj: usize) -> Mat<C64> {
    let n = m.nrows() / 2;
    Mat::from_fn(n, n, |i, j| m[(bi * n + i, bj * n + j)])
}

/// `m · R` for a dense `2N×2N` matrix and a structured 2×2 block operator `R`.
pub fn block_right_apply(m: &Mat<C64>, r: &[[OpSum; 2]; 2]) -> Mat<C64> {
    let blocks: [[Mat<C64>; 2]; 2] = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut acc = r[0][j].right_apply(&sub_block(m, i, 0));
            let second = r[1][j].right_apply(&sub_block(m, i, 1));
            add_scaled(&mut acc, C64::new(1.0, 0.0), &second);
            acc
        })
    });
    block2(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use faer::Scale;

    fn close(a: &Mat<C64>, b: &Mat<C64>) -> f64 {
        let mut e: f64 = 0.0;
        for j in 0..a.ncols() {
            for i in 0..a.nrows() {
                e = e.max((a[(i, j)] - b[(i, j)]).norm());
            }
        }
        e
    }

    #[test]
    fn chain_matches_dense_products() {
        let n = 16;
        let d: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * i as f64).collect();
        let a = Mat::from_fn(n, n, |i, j| C64::new((i * 3 + j) as f64 % 7.0, (i + 2 * j) as f64 % 5.0));
        let h = FourierSymbol::hilbert();
        let dd = FourierSymbol::deriv(1);
        let op = OpSum::chain(
            C64::new(0.5, 1.0),
            vec![Factor::Mult(h.clone()), Factor::diag_real(&d), Factor::Dense(Arc::new(a.clone())), Factor::Mult(dd.clone())],
        );
        let dm = Mat::from_fn(n, n, |i, j| if i == j { C64::new(d[i], 0.0) } else { C64::new(0.0, 0.0) });
        let want = Scale(C64::new(0.5, 1.0)) * (&(&(&h.matrix(n) * &dm) * &a) * &dd.matrix(n));
        assert!(close(&op.to_matrix(n), &want) < 1e-11);
        let right = op.right_apply(&a);
        assert!(close(&right, &(&a * &want)) < 1e-9);
    }

}
