//! Cylinder functions of integer order 0 and 1 for positive real argument.
//!
//! Three regimes are used:
//!
//! * `z < 2`: ascending power series (the defining series of `J_ν` and `Y_ν`);
//! * `2 ≤ z < 25`: Miller's backward recurrence for `J_n`, normalized by
//!   `J_0 + 2 Σ J_{2k} = 1`, with `Y_0`, `Y_1` from the Neumann series built on
//!   the same sequence;
//! * `z ≥ 25`: Hankel's asymptotic expansion, truncated at its smallest term
//!   (which is below `e^{-2z}` and therefore negligible).
//!
//! The asymptotic expansion alone would only give about seven digits near
//! `z = 8`, which is why the recurrence covers the middle range.

use num_complex::Complex64 as C64;
use std::f64::consts::{FRAC_2_PI, PI};

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_LIMIT: f64 = 2.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;

/// Selector for [`bessel_hankel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselKind {
    /// Bessel function of the first kind, order 0.
    J0,
    /// Bessel function of the first kind, order 1.
    J1,
    /// Bessel function of the second kind, order 0.
    Y0,
    /// Bessel function of the second kind, order 1.
    Y1,
    /// Hankel function of the first kind, order 0.
    H0,
    /// Hankel function of the first kind, order 1.
    H1,
}

/// The four real cylinder functions `J0, J1, Y0, Y1` at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cylinder {
    /// `J_0(z)`.
    pub j0: f64,
    /// `J_1(z)`.
    pub j1: f64,
    /// `Y_0(z)`.
    pub y0: f64,
    /// `Y_1(z)`.
    pub y1: f64,
}

impl Cylinder {
    /// `H^{(1)}_0(z) = J_0 + i Y_0`.
    pub fn h0(&self) -> C64 {
        C64::new(self.j0, self.y0)
    }

    /// `H^{(1)}_1(z) = J_1 + i Y_1`.
    pub fn h1(&self) -> C64 {
        C64::new(self.j1, self.y1)
    }

    /// `H^{(1)}_2(z) = 2 H_1(z)/z − H_0(z)`.
    pub fn h2(&self, z: f64) -> C64 {
        self.h1() * (2.0 / z) - self.h0()
    }
}

/// Evaluates one of the cylinder functions at `z > 0`.
pub fn bessel_hankel(kind: BesselKind, z: f64) -> Result<C64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("cylinder functions need a positive finite argument, got {z}")));
    }
    let c = cylinder(z);
    Ok(match kind {
        BesselKind::J0 => C64::new(c.j0, 0.0),
        BesselKind::J1 => C64::new(c.j1, 0.0),
        BesselKind::Y0 => C64::new(c.y0, 0.0),
        BesselKind::Y1 => C64::new(c.y1, 0.0),
        BesselKind::H0 => c.h0(),
        BesselKind::H1 => c.h1(),
    })
}

/// Evaluates `J0, J1, Y0, Y1` at `z > 0` (unchecked; callers guarantee `z > 0`).
pub fn cylinder(z: f64) -> Cylinder {
    debug_assert!(z > 0.0);
    if z < SERIES_LIMIT {
        ascending_series(z)
    } else if z < ASYMPTOTIC_LIMIT {
        miller(z)
    } else {
        hankel_asymptotic(z)
    }
}

/// `J_0(z)` for `z ≥ 0` (with `J_0(0) = 1`).
pub fn j0(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        cylinder(z.abs()).j0
    }
}

/// `1 − J_0(z)` without cancellation for small `z`.
pub fn one_minus_j0(z: f64) -> f64 {
    let z = z.abs();
    if z < 1.0 {
        let q = 0.25 * z * z;
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..40 {
            term *= -q / ((k * k) as f64);
            sum -= term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        1.0 - j0(z)
    }
}

/// `J_1(z)/z` for `z ≥ 0`, with the limit `1/2` at the origin.
pub fn j1_over_z(z: f64) -> f64 {
    let z = z.abs();
    if z < 1e-3 {
        let q = 0.25 * z * z;
        0.5 * (1.0 - 0.5 * q + q * q / 12.0)
    } else {
        cylinder(z).j1 / z
    }
}

fn ascending_series(z: f64) -> Cylinder {
    let q = 0.25 * z * z;
    let log_term = (0.5 * z).ln() + EULER_GAMMA;
    // J0 and the Y0 correction sum Σ (−1)^{k+1} H_k q^k/(k!)^2.
    let mut t0 = 1.0; // (−q)^k/(k!)^2
    let mut j0 = 1.0;
    let mut y0_sum = 0.0;
    let mut harmonic = 0.0;
    // J1/(z/2) = Σ (−q)^k/(k!(k+1)!), Y1 digamma sum Σ (ψ(k+1)+ψ(k+2)) (−q)^k/(k!(k+1)!).
    let mut t1 = 1.0;
    let mut j1_red = 1.0;
    let mut psi_k1 = -EULER_GAMMA; // ψ(1)
    let mut psi_k2 = 1.0 - EULER_GAMMA; // ψ(2)
    let mut y1_sum = psi_k1 + psi_k2;
    for k in 1..60 {
        let kf = k as f64;
        t0 *= -q / (kf * kf);
        harmonic += 1.0 / kf;
        j0 += t0;
        y0_sum -= harmonic * t0;
        t1 *= -q / (kf * (kf + 1.0));
        psi_k1 += 1.0 / kf;
        psi_k2 += 1.0 / (kf + 1.0);
        j1_red += t1;
        y1_sum += (psi_k1 + psi_k2) * t1;
        if t0.abs() < 1e-18 && t1.abs() < 1e-18 {
            break;
        }
    }
    let j1 = 0.5 * z * j1_red;
    let y0 = FRAC_2_PI * (log_term * j0 + y0_sum);
    let y1 = -FRAC_2_PI / z + FRAC_2_PI * (0.5 * z).ln() * j1 - (0.5 * z / PI) * y1_sum;
    Cylinder { j0, j1, y0, y1 }
}

fn miller(z: f64) -> Cylinder {
    let top = 2 * ((1.5 * z + 30.0) as usize / 2 + 1);
    let mut j = vec![0.0f64; top + 2];
    j[top] = 1e-300_f64.sqrt();
    for n in (1..=top).rev() {
        j[n - 1] = (2.0 * n as f64 / z) * j[n] - j[n + 1];
        if j[n - 1].abs() > 1e200 {
            for v in j.iter_mut().skip(n - 1) {
                *v *= 1e-200;
            }
        }
    }
    let mut norm = j[0];
    for k in (2..=top).step_by(2) {
        norm += 2.0 * j[k];
    }
    for v in j.iter_mut() {
        *v /= norm;
    }
    let log_term = (0.5 * z).ln() + EULER_GAMMA;
    let mut y0_sum = 0.0;
    let mut y1_sum = 0.0;
    let mut sign = -1.0;
    let mut k = 1;
    while 2 * k < top {
        let kf = k as f64;
        y0_sum += sign * j[2 * k] / kf;
        y1_sum += sign * (j[2 * k - 1] - j[2 * k + 1]) / kf;
        sign = -sign;
        k += 1;
    }
    let y0 = FRAC_2_PI * log_term * j[0] - 2.0 * FRAC_2_PI * y0_sum;
    let y1 = -FRAC_2_PI * j[0] / z + FRAC_2_PI * log_term * j[1] + FRAC_2_PI * y1_sum;
    Cylinder { j0: j[0], j1: j[1], y0, y1 }
}

/// Hankel's `P_ν`, `Q_ν` for `ν ∈ {0,1}` truncated at the smallest term.
fn pq(nu: u32, z: f64) -> (f64, f64) {
    let mu = 4.0 * (nu * nu) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0; // a_k(ν)/z^k
    let mut last = f64::INFINITY;
    for k in 1..80 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * 8.0 * z);
        if a.abs() >= last || a == 0.0 {
            break;
        }
        last = a.abs();
        // k odd contributes to Q with sign (−1)^{(k−1)/2}; k even to P with (−1)^{k/2}.
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.abs() < 1e-18 {
            break;
        }
    }
    (p, q)
}

fn hankel_asymptotic(z: f64) -> Cylinder {
    let amp = (FRAC_2_PI / z).sqrt();
    let (s, c) = z.sin_cos();
    // χ0 = z − π/4, χ1 = z − 3π/4.
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let (s0, c0) = (r * (s - c), r * (c + s));
    let (s1, c1) = (-r * (s + c), r * (s - c));
    let (p0, q0) = pq(0, z);
    let (p1, q1) = pq(1, z);
    Cylinder {
        j0: amp * (p0 * c0 - q0 * s0),
        y0: amp * (p0 * s0 + q0 * c0),
        j1: amp * (p1 * c1 - q1 * s1),
        y1: amp * (p1 * s1 + q1 * c1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regimes_agree_at_crossovers() {
        for &z in &[SERIES_LIMIT, ASYMPTOTIC_LIMIT] {
            let a = if z == SERIES_LIMIT { ascending_series(z) } else { miller(z) };
            let b = if z == SERIES_LIMIT { miller(z) } else { hankel_asymptotic(z) };
            assert!((a.j0 - b.j0).abs() < 1e-14, "{z}");
            assert!((a.j1 - b.j1).abs() < 1e-14, "{z}");
            assert!((a.y0 - b.y0).abs() < 1e-14, "{z}");
            assert!((a.y1 - b.y1).abs() < 1e-14, "{z}");
        }
    }

    #[test]
    fn one_minus_j0_is_continuous() {
        let a = one_minus_j0(1.0 - 1e-12);
        let b = one_minus_j0(1.0 + 1e-12);
        assert!((a - b).abs() < 1e-12);
        let q: f64 = 0.25e-8;
        assert!((one_minus_j0(1e-4) - (q - q * q / 4.0)).abs() < 1e-24);
    }

    #[test]
    fn rejects_nonpositive_argument() {
        assert!(bessel_hankel(BesselKind::J0, 0.0).is_err());
        assert!(bessel_hankel(BesselKind::Y1, -1.0).is_err());
    }
}
