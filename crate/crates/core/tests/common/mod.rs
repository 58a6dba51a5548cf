//! Independent oracles shared by the integration tests and the acceptance
//! harness: Bessel tables for the circle spectrum, Richardson extrapolation,
//! and adaptive quadrature of the logarithmic Fourier coefficients.
#![allow(dead_code)]

use std::f64::consts::PI;

use faer::Mat;
use navier_bie::geometry::{circle, Curve};
use navier_bie::kernels::{singular_factor, split, target, DiscreteKernels, KernelKind};
use navier_bie::spectral::FourierSymbol;
use num_complex::Complex64 as C64;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

// [n, J_n(k), Y_n(k), J_n'(k), Y_n'(k)], generated with mpmath at 40 digits.
pub const K1: [[f64; 5]; 11] = [
    [0.0, 0.76519768655796655, 0.088256964215676958, -0.44005058574493352, 0.78121282130028872],
    [1.0, 0.44005058574493352, -0.78121282130028872, 0.32514710081303304, 0.86946978551596567],
    [2.0, 0.11490348493190048, -1.6506826068162544, 0.21024361588113256, 2.5201523923322201],
    [3.0, 0.019563353982668406, -5.8215176059647288, 0.056213422983895263, 15.813870211077932],
    [4.0, 0.002476638964109955, -33.278423028972119, 0.0096567981262285857, 127.29217450992375],
    [5.0, 0.00024975773021123443, -260.40586662581222, 0.0012278503130537829, 1268.750910100089],
    [6.0, 0.00002093833800238927, -2570.7802432291501, 0.00012412770219689881, 15164.275592749088],
    [7.0, 1.5023258174368082e-6, -30588.957052123989, 0.000010422057280331612, 211551.91912163877],
    [8.0, 9.4223441726045005e-8, -425674.61848650669, 7.4853828362844817e-7, 3374807.9908399296],
    [9.0, 5.249250179911875e-9, -6780204.9387319831, 4.698019010683813e-8, 60596169.830101341],
    [10.0, 2.6306151236874532e-10, -121618014.27868919, 2.6186350562244218e-9, 1209399937.8481599],
];
pub const K35: [[f64; 5]; 11] = [
    [0.0, -0.38012773998726338, 0.18902194392082651, -0.13737752736232719, -0.41018841788751188],
    [1.0, 0.13737752736232719, 0.41018841788751188, -0.41937846209078543, 0.071825253095823112],
    [2.0, 0.45862918419430748, 0.045371437729180283, -0.12469629217727709, 0.38426188204226601],
    [3.0, 0.38677011171688137, -0.35833534619702013, 0.12711194557983774, 0.35251602018376897],
    [4.0, 0.204405293034632, -0.65966060263835765, 0.15316406253444479, 0.39556248538967433],
    [5.0, 0.080441986647991782, -1.1494603169763688, 0.0894881692517866, 0.98242556447074061],
    [6.0, 0.025428954531058803, -2.6245117315798389, 0.036849493166176692, 3.3497026514462121],
    [7.0, 0.0067430003156383986, -7.8488656198687931, 0.011942953899782005, 13.073219508157747],
    [8.0, 0.0015430467314947918, -28.770950747895333, 0.0032160363579360174, 57.913307518177683],
    [9.0, 0.00031092759976636373, -123.67548065622416, 0.00074351861780985646, 289.25171379668108],
    [10.0, 0.000056009495875078836, -607.27437834125749, 0.00015090046869470991, 1611.3941717473687],
];

/// Circle eigenvalues of the boundary operators, from the addition theorem.
pub struct CircleSpectrum<'a> {
    pub k: f64,
    pub table: &'a [[f64; 5]; 11],
}

impl CircleSpectrum<'_> {
    pub fn v(&self, n: i64) -> C64 {
        let r = self.table[n.unsigned_abs() as usize];
        0.5 * PI * I * r[1] * C64::new(r[1], r[2])
    }
    pub fn kt(&self, n: i64) -> C64 {
        let r = self.table[n.unsigned_abs() as usize];
        0.5 * PI * I * self.k * r[1] * C64::new(r[3], r[4]) + 0.5
    }
    pub fn w(&self, n: i64) -> C64 {
        let r = self.table[n.unsigned_abs() as usize];
        0.5 * PI * I * self.k * self.k * r[3] * C64::new(r[3], r[4])
    }
    pub fn vtn(&self, n: i64) -> C64 {
        0.5 * I * (self.v(n - 1) - self.v(n + 1))
    }
}

pub fn mode_samples(n_grid: usize, n: i64) -> Vec<C64> {
    (0..n_grid).map(|m| C64::from_polar(1.0, n as f64 * 2.0 * PI * m as f64 / n_grid as f64)).collect()
}

pub fn matvec(a: &Mat<C64>, x: &[C64]) -> Vec<C64> {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[(i, j)] * x[j]).sum()).collect()
}

pub fn matmul(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
    a * b
}

/// Max-norm residual of `M e_n − λ e_n`, relative to `max(1, |λ|)`.
pub fn eig_residual(m: &Mat<C64>, n: i64, lambda: C64) -> f64 {
    let e = mode_samples(m.nrows(), n);
    let y = matvec(m, &e);
    let r = y.iter().zip(&e).map(|(y, e)| (y - lambda * e).norm()).fold(0.0, f64::max);
    r / lambda.norm().max(1.0)
}

pub fn circle_operators(k: f64, n_grid: usize) -> (DiscreteKernels, Mat<C64>) {
    let c = circle(1.0).unwrap();
    let frames = c.node_frames(n_grid).unwrap();
    let dk = DiscreteKernels::assemble(k, &frames).unwrap();
    let d = FourierSymbol::deriv(1).matrix(n_grid);
    (dk, d)
}

/// Richardson-extrapolated limit τ → t of `f(t − δ)` from `δ, δ/2, δ/4, δ/8`.
pub fn richardson(f: impl Fn(f64) -> C64, h: f64) -> C64 {
    let mut row: Vec<C64> = (0..4).map(|i| f(h / f64::powi(2.0, i))).collect();
    for level in 1..4 {
        let p = f64::powi(2.0, level);
        row = row.windows(2).map(|w| (w[1] * p - w[0]) / (p - 1.0)).collect();
    }
    row[0]
}

pub fn reconstruction_error(curve: &Curve, kind: KernelKind, k: f64, t: f64, tau: f64) -> f64 {
    let ft = curve.frame(t).unwrap();
    let fs = curve.frame(tau).unwrap();
    let sv = split(kind, k, &ft, &fs).unwrap();
    let sing = sv.a * singular_factor(kind.order(), t - tau);
    let tgt = target(kind, k, &ft, &fs).unwrap();
    (sing + sv.b - tgt).norm() / tgt.norm().max(sing.norm())
}

/// `(1/2π)∫₀^{2π} ρ_r(τ) e^{−inτ} dτ` with `ρ_r(τ) = −(e^{iτ}−1)^{r−1} log(2|sin(τ/2)|)`,
/// by tanh–sinh quadrature. The interval is folded onto `(0, π)` so that the
/// logarithmic endpoint sits at `s = 0`, where the substitution resolves it to
/// full precision.
pub fn rho_hat_quadrature(r: u32, n: i64) -> C64 {
    let rho = |tau: f64, dist: f64| -> C64 {
        let e1 = C64::from_polar(1.0, tau) - 1.0;
        -e1.powu(r - 1) * (2.0 * (0.5 * dist).sin()).ln()
    };
    let h = 1.0 / 128.0;
    let mut sum = C64::new(0.0, 0.0);
    for j in -640i32..=640 {
        let u = j as f64 * h;
        let v = 0.5 * PI * u.sinh();
        // s = π(1 + tanh v)/2, computed without cancellation near s = 0.
        let s = PI / (1.0 + (-2.0 * v).exp());
        let w = 0.5 * PI * (0.5 * PI * u.cosh()) / v.cosh().powi(2);
        if s <= 0.0 || !w.is_finite() || w == 0.0 {
            continue;
        }
        let f = rho(s, s) * C64::from_polar(1.0, -(n as f64) * s) + rho(-s, s) * C64::from_polar(1.0, n as f64 * s);
        sum += w * h * f;
    }
    sum / (2.0 * PI)
}
