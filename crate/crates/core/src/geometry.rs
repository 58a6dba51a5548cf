//! Smooth closed boundary curves, their derivative frames, and arc-length
//! reparametrization.
//!
//! Every curve is stored as a finite trigonometric series
//! `x(t) = Σ_n c_n e^{int}` (one complex coefficient per component and mode).
//! The built-in geometries are trigonometric polynomials, and a resampled
//! curve is the trigonometric interpolant of its node values on a fine grid,
//! so both kinds share the same exact evaluation of `x, x′, x″, x‴`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::forward;

/// Default fine-grid size for resampled curves and length quadrature.
pub const DEFAULT_N_AUX: usize = 4096;

/// How the parametrization was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    /// The closed-form (natural) parametrization.
    AnalyticFormula,
    /// Trigonometric interpolant of an arc-length resampling.
    ResampledArcLength,
}

/// Structured record identifying a curve (for manifests and result files).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    /// Geometry name.
    pub name: String,
    /// Scale factor applied to the unit-size formula.
    pub r: f64,
    /// Parametrization kind.
    pub kind: CurveKind,
    /// Fine-grid size of a resampled curve (0 for analytic curves).
    pub n_aux: usize,
}


/// A smooth, positively oriented, `2π`-periodic closed curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    name: String,
    kind: CurveKind,
    scale: f64,
    n_aux: usize,
    /// Mode coefficients `c_n`, `n ≥ 0`, of `x = Re(c₀) + 2 Re Σ_{n>0} c_n e^{int}`.
    coef: Vec<[C64; 2]>,
    length: f64,
}

/// Position, derivative stack and orthonormal frame at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveFrame {
    /// Parameter value.
    pub t: f64,
    /// Position `x(t)`.
    pub x: [f64; 2],
    /// `x′(t)`.
    pub d1: [f64; 2],
    /// `x″(t)`.
    pub d2: [f64; 2],
    /// `x‴(t)`.
    pub d3: [f64; 2],
    /// Speed `η = |x′|`.
    pub eta: f64,
    /// Unit tangent `x′/η`.
    pub tangent: [f64; 2],
    /// Outward unit normal `Q t̂ = (t̂₂, −t̂₁)`.
    pub normal: [f64; 2],
    /// Signed curvature `(x′ × x″)/η³` (positive on convex arcs).
    pub kappa: f64,
}

impl CurveFrame {
    /// `η′ = x′·x″/η`.
    pub fn eta_prime(&self) -> f64 {
        dot(self.d1, self.d2) / self.eta
    }

    /// `x′ × x″`.
    pub fn cross12(&self) -> f64 {
        cross(self.d1, self.d2)
    }
}

/// Euclidean dot product in the plane.
pub fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Scalar cross product `a₁b₂ − a₂b₁`.
pub fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Real cosine/sine coefficient lists of the two components of a curve:
/// `x_j(t) = Σ_n cos_j[n] cos(nt) + sin_j[n] sin(nt)` (index `n = 0, 1, …`).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FourierCurveSpec {
    /// Cosine coefficients of `x₁`.
    #[serde(default)]
    pub x1_cos: Vec<f64>,
    /// Sine coefficients of `x₁`.
    #[serde(default)]
    pub x1_sin: Vec<f64>,
    /// Cosine coefficients of `x₂`.
    #[serde(default)]
    pub x2_cos: Vec<f64>,
    /// Sine coefficients of `x₂`.
    #[serde(default)]
    pub x2_sin: Vec<f64>,
}

/// Names of the built-in geometries.
pub const BUILTIN_NAMES: [&str; 3] = ["ellipse", "kite", "cavity"];

/// Returns one of the built-in geometries, scaled to length `2π`.
pub fn builtin_curve(name: &str) -> Result<Curve> {
    let spec = match name {
        "ellipse" => FourierCurveSpec { x1_cos: vec![0.0, 1.0], x2_sin: vec![0.0, 2.0], ..Default::default() },
        "kite" => FourierCurveSpec { x1_cos: vec![0.0, 1.0, 1.0], x2_sin: vec![0.0, 2.0], ..Default::default() },
        "cavity" => FourierCurveSpec {
            x1_cos: vec![0.0, 0.4, 0.8],
            x2_sin: vec![0.0, 7.0 / 12.0, 17.0 / 48.0, 3.0 / 8.0, -1.0 / 24.0],
            ..Default::default()
        },
        other => {
            return Err(Error::Config(format!(
                "unknown geometry '{other}' (valid: {})",
                BUILTIN_NAMES.join(", ")
            )))
        }
    };
    let unit = Curve::from_fourier(name, &spec, 1.0)?;
    let r = 2.0 * PI / unit.length();
    Curve::from_fourier(name, &spec, r)
}

/// The circle of the given radius centred at the origin, `x = ρ(cos t, sin t)`.
pub fn circle(radius: f64) -> Result<Curve> {
    let spec = FourierCurveSpec { x1_cos: vec![0.0, 1.0], x2_sin: vec![0.0, 1.0], ..Default::default() };
    Curve::from_fourier("circle", &spec, radius)
}

impl Curve {
    /// Builds an analytic curve from real cosine/sine coefficient lists, scaled by `r`.
    pub fn from_fourier(name: &str, spec: &FourierCurveSpec, r: f64) -> Result<Curve> {
        if !(r > 0.0) {
            return Err(Error::Config(format!("curve scale must be positive, got {r}")));
        }
        let modes = [&spec.x1_cos, &spec.x1_sin, &spec.x2_cos, &spec.x2_sin]
            .iter()
            .map(|v| v.len())
            .max()
            .unwrap_or(0);
        let get = |v: &Vec<f64>, n: usize| v.get(n).copied().unwrap_or(0.0);
        let coef = (0..modes.max(1))
            .map(|n| {
                let (a1, b1, a2, b2) =
                    (get(&spec.x1_cos, n), get(&spec.x1_sin, n), get(&spec.x2_cos, n), get(&spec.x2_sin, n));
                if n == 0 {
                    [C64::new(r * a1, 0.0), C64::new(r * a2, 0.0)]
                } else {
                    // a cos(nt) + b sin(nt) = 2 Re(((a − ib)/2) e^{int})
                    [C64::new(a1, -b1) * (0.5 * r), C64::new(a2, -b2) * (0.5 * r)]
                }
            })
            .collect();
        let mut curve = Curve {
            name: name.to_string(),
            kind: CurveKind::AnalyticFormula,
            scale: r,
            n_aux: 0,
            coef,
            length: 0.0,
        };
        curve.finish()?;
        Ok(curve)
    }

    /// Trigonometric interpolant of node values `x(2πj/M)`, `j = 0..M`.
    fn from_samples(name: &str, x1: &[f64], x2: &[f64], kind: CurveKind, scale: f64) -> Result<Curve> {
        let m = x1.len();
        let c1 = forward(&x1.iter().map(|&v| C64::new(v, 0.0)).collect::<Vec<_>>());
        let c2 = forward(&x2.iter().map(|&v| C64::new(v, 0.0)).collect::<Vec<_>>());
        // The Nyquist mode is split symmetrically between ±M/2 so the interpolant stays real.
        let coef = (0..=m / 2)
            .map(|n| if n == m / 2 { [c1[n] * 0.5, c2[n] * 0.5] } else { [c1[n], c2[n]] })
            .collect();
        let mut curve = Curve { name: name.to_string(), kind, scale, n_aux: m, coef, length: 0.0 };
        curve.finish()?;
        Ok(curve)
    }

    fn finish(&mut self) -> Result<()> {
        let m = DEFAULT_N_AUX.max(self.n_aux);
        let mut total = 0.0;
        for j in 0..m {
            let t = 2.0 * PI * j as f64 / m as f64;
            let d1 = self.derivative(t, 1);
            let eta = dot(d1, d1).sqrt();
            if !(eta > 1e-12) {
                return Err(Error::DegenerateParametrization(format!(
                    "curve '{}' has speed {eta:e} at t = {t}",
                    self.name
                )));
            }
            total += eta;
        }
        self.length = total * 2.0 * PI / m as f64;
        Ok(())
    }

    /// Curve name.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Parametrization kind.
    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    /// Total length (spectrally accurate trapezoidal integral of `η`).
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Serializable identification record.
    pub fn record(&self) -> CurveRecord {
        CurveRecord { name: self.name.clone(), r: self.scale, kind: self.kind, n_aux: self.n_aux }
    }

    /// Highest Fourier mode present in the position map.
    pub fn max_mode(&self) -> i64 {
        self.coef.len() as i64 - 1
    }

    /// Accumulates `Re Σ w_n c_n (in)^k e^{int}` for `k = 0..=K` using an
    /// exponential recurrence (re-anchored every 64 modes to bound round-off).
    fn sums<const K: usize>(&self, t: f64) -> [[f64; 2]; K] {
        let mut acc = [[0.0; 2]; K];
        let step = C64::new(t.cos(), t.sin());
        let mut e = C64::new(1.0, 0.0);
        for (n, c) in self.coef.iter().enumerate() {
            if n > 0 {
                e = if n % 64 == 0 { C64::new((n as f64 * t).cos(), (n as f64 * t).sin()) } else { e * step };
            }
            let w = if n == 0 { 1.0 } else { 2.0 };
            let mut v = e * w;
            let inn = C64::new(0.0, n as f64);
            for a in acc.iter_mut() {
                a[0] += (c[0] * v).re;
                a[1] += (c[1] * v).re;
                v *= inn;
            }
        }
        acc
    }

    /// `k`-th derivative of the position map at `t` (`k = 0` is the position).
    pub fn derivative(&self, t: f64, k: u32) -> [f64; 2] {
        match k {
            0 => self.sums::<1>(t)[0],
            1 => self.sums::<2>(t)[1],
            2 => self.sums::<3>(t)[2],
            3 => self.sums::<4>(t)[3],
            _ => {
                let mut acc = [0.0, 0.0];
                for (n, c) in self.coef.iter().enumerate() {
                    let nf = n as f64;
                    let w = C64::new(0.0, nf).powu(k) * C64::new((nf * t).cos(), (nf * t).sin()) * 2.0;
                    acc[0] += (c[0] * w).re;
                    acc[1] += (c[1] * w).re;
                }
                acc
            }
        }
    }

    /// Chord `x(t) − x(τ)` summed mode by mode as `c_n e^{inτ}(e^{in(t−τ)} − 1)`,
    /// which keeps full relative accuracy when `τ → t`.
    pub fn chord(&self, t: f64, tau: f64) -> [f64; 2] {
        let d = t - tau;
        let mut acc = [0.0, 0.0];
        for (n, c) in self.coef.iter().enumerate().skip(1) {
            let nf = n as f64;
            let (s, co) = (0.5 * nf * d).sin_cos();
            let em1 = C64::new(0.0, 2.0 * s) * C64::new(co, s);
            let w = C64::new((nf * tau).cos(), (nf * tau).sin()) * em1 * 2.0;
            acc[0] += (c[0] * w).re;
            acc[1] += (c[1] * w).re;
        }
        acc
    }

    /// Position `x(t)`.
    pub fn position(&self, t: f64) -> [f64; 2] {
        self.derivative(t, 0)
    }

    /// Full derivative frame at `t`.
    pub fn frame(&self, t: f64) -> Result<CurveFrame> {
        let [x, d1, d2, d3] = self.sums::<4>(t);
        let d = [d1, d2, d3];
        let eta = dot(d[0], d[0]).sqrt();
        if !(eta > 1e-12) {
            return Err(Error::DegenerateParametrization(format!("speed {eta:e} at t = {t} on '{}'", self.name)));
        }
        let tangent = [d[0][0] / eta, d[0][1] / eta];
        Ok(CurveFrame {
            t,
            x,
            d1: d[0],
            d2: d[1],
            d3: d[2],
            eta,
            tangent,
            normal: [tangent[1], -tangent[0]],
            kappa: cross(d[0], d[1]) / (eta * eta * eta),
        })
    }

    /// Frames at the `N` grid nodes `t_m = 2πm/N`.
    pub fn node_frames(&self, n_grid: usize) -> Result<Vec<CurveFrame>> {
        crate::spectral::nodes(n_grid).into_iter().map(|t| self.frame(t)).collect()
    }

    /// Geometrically scaled copy `s·x(t)`.
    pub fn scaled(&self, s: f64) -> Result<Curve> {
        if !(s > 0.0) {
            return Err(Error::Config(format!("scale factor must be positive, got {s}")));
        }
        let mut c = self.clone();
        for cn in c.coef.iter_mut() {
            cn[0] *= s;
            cn[1] *= s;
        }
        c.scale *= s;
        c.length *= s;
        Ok(c)
    }

    /// Winding number of the curve around `p` (±1 inside, 0 outside).
    pub fn winding_number(&self, p: [f64; 2]) -> f64 {
        let m = 2048.max(8 * self.max_mode() as usize);
        let mut total = 0.0;
        let pts: Vec<[f64; 2]> = (0..m).map(|j| self.position(2.0 * PI * j as f64 / m as f64)).collect();
        for j in 0..m {
            let a = [pts[j][0] - p[0], pts[j][1] - p[1]];
            let b = [pts[(j + 1) % m][0] - p[0], pts[(j + 1) % m][1] - p[1]];
            total += cross(a, b).atan2(dot(a, b));
        }
        total / (2.0 * PI)
    }

    /// True when `p` is enclosed by the curve.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.winding_number(p).abs() > 0.5
    }

    /// Distance from `p` to the curve, from a fine sampling refined by Newton steps.
    pub fn distance_to(&self, p: [f64; 2]) -> f64 {
        let m = 1024.max(8 * self.max_mode() as usize);
        let mut best = (f64::INFINITY, 0.0);
        for j in 0..m {
            let t = 2.0 * PI * j as f64 / m as f64;
            let x = self.position(t);
            let d = ((x[0] - p[0]).powi(2) + (x[1] - p[1]).powi(2)).sqrt();
            if d < best.0 {
                best = (d, t);
            }
        }
        let mut t = best.1;
        for _ in 0..20 {
            let x = self.position(t);
            let d1 = self.derivative(t, 1);
            let d2 = self.derivative(t, 2);
            let r = [x[0] - p[0], x[1] - p[1]];
            let g = dot(r, d1);
            let h = dot(d1, d1) + dot(r, d2);
            if h <= 0.0 {
                break;
            }
            let step = g / h;
            t -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let x = self.position(t);
        let d = ((x[0] - p[0]).powi(2) + (x[1] - p[1]).powi(2)).sqrt();
        d.min(best.0)
    }
}

/// Reparametrizes `curve` by (normalized) arc length on an `n_aux`-point grid.
///
/// The returned curve satisfies `|x̃′(σ)| = L/(2π)`, i.e. unit speed when the
/// length is `2π`. Node positions lie exactly on the original curve.
pub fn arclength_reparametrize(curve: &Curve, n_aux: usize) -> Result<Curve> {
    if n_aux < 256 || !n_aux.is_power_of_two() {
        return Err(Error::Config(format!("n_aux must be a power of two ≥ 256, got {n_aux}")));
    }
    // Spectral integration of η: s(t) = η̂₀ t + Σ_{n≠0} η̂_n (e^{int} − 1)/(in).
    let m = n_aux;
    let eta: Vec<C64> = (0..m)
        .map(|j| {
            let d1 = curve.derivative(2.0 * PI * j as f64 / m as f64, 1);
            C64::new(dot(d1, d1).sqrt(), 0.0)
        })
        .collect();
    let eta_hat = forward(&eta);
    let mean = eta_hat[0].re;
    let length = 2.0 * PI * mean;
    // η is real, so the ±n terms pair up: s(t) = η̂₀ t + 2 Re Σ_{0<n<M/2} η̂_n (e^{int} − 1)/(in).
    let modes: Vec<C64> = (1..m / 2).map(|n| eta_hat[n] / C64::new(0.0, n as f64) * 2.0).collect();
    let s_of = |t: f64| -> f64 {
        let mut s = mean * t;
        let step = C64::new(t.cos(), t.sin());
        let mut e = C64::new(1.0, 0.0);
        for (i, c) in modes.iter().enumerate() {
            let n = i + 1;
            e = if n % 64 == 0 { C64::new((n as f64 * t).cos(), (n as f64 * t).sin()) } else { e * step };
            s += (c * (e - 1.0)).re;
        }
        s
    };
    let mut x1 = vec![0.0; m];
    let mut x2 = vec![0.0; m];
    for j in 0..m {
        let target = length * j as f64 / m as f64;
        let mut t = target * 2.0 * PI / length;
        let mut converged = false;
        for _ in 0..50 {
            let d1 = curve.derivative(t, 1);
            let speed = dot(d1, d1).sqrt();
            let res = s_of(t) - target;
            t -= res / speed;
            if res.abs() < 1e-12 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Reparametrization(format!(
                "Newton inversion of the arc-length map stalled at node {j} of '{}'",
                curve.name()
            )));
        }
        let p = curve.position(t);
        x1[j] = p[0];
        x2[j] = p[1];
    }
    Curve::from_samples(curve.name(), &x1, &x2, CurveKind::ResampledArcLength, curve.scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_name_is_config_error() {
        assert!(matches!(builtin_curve("square"), Err(Error::Config(_))));
    }

    #[test]
    fn circle_frame() {
        let c = circle(1.0).unwrap();
        let f = c.frame(0.3).unwrap();
        assert!((f.kappa - 1.0).abs() < 1e-14);
        assert!((f.normal[0] - 0.3f64.cos()).abs() < 1e-14);
        assert!((f.normal[1] - 0.3f64.sin()).abs() < 1e-14);
    }
}
