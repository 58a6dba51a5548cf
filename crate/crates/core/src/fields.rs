//! Incident point sources, boundary data, exterior field evaluation and the
//! end-to-end pipeline (assemble → solve → recover → evaluate).
//!
//! The scattered displacement is represented as `u = ∇u_p + vcurl u_s` with
//! `vcurl φ = (∂₂φ, −∂₁φ)` and the combined potentials
//! `u_k = DL_k[φ_k] − SL_k[Y_kφ_k]`, where `DL_k` has kernel `∂_{n(y)}φ_k(x − y)`
//! and `φ_k(z) = (i/4)H₀⁽¹⁾(k|z|)`.

use std::io::Write;
use std::time::{Duration, Instant};

use faer::Mat;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assembly::{assemble_system_arclength, assemble_system_general, SystemMatrix};
use crate::error::{Error, Result};
use crate::geometry::{arclength_reparametrize, Curve, CurveFrame};
use crate::params::ProblemParams;
use crate::solve::{solve, SolveReport, SolverKind};
use crate::special::cylinder;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Width of the band around the boundary in which fields are not evaluated
/// (the rectangular rule is inaccurate for nearly singular integrands).
pub const NEAR_FIELD_BAND: f64 = 0.1;

/// Length tolerance above which the wavenumber rescaling to a `2π`-long curve is applied.
pub const LENGTH_TOLERANCE: f64 = 1e-6;

/// Default number of auxiliary nodes for arc-length resampling.
pub const DEFAULT_ARC_NODES: usize = 4096;

/// Default point-source location.
pub const DEFAULT_SOURCE: [f64; 2] = [0.1, 0.0];

/// Default point-source location for a named geometry: [`DEFAULT_SOURCE`],
/// except for the cavity, whose opening contains that point; there the source
/// sits on the symmetry axis at `(0.55, 0)`.
pub fn default_source_for(geometry: &str) -> [f64; 2] {
    match geometry {
        "cavity" => [0.55, 0.0],
        _ => DEFAULT_SOURCE,
    }
}

/// Boundary parametrization used by the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParamKind {
    /// Resample by arc length and use the arc-length formulation.
    Arc,
    /// Keep the analytic parametrization and use the general formulation.
    Natural,
}

impl ParamKind {
    /// Lower-case name used in configs and CSV output.
    pub fn as_str(self) -> &'static str {
        match self {
            ParamKind::Arc => "arc",
            ParamKind::Natural => "natural",
        }
    }
}

impl std::str::FromStr for ParamKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "arc" => Ok(ParamKind::Arc),
            "natural" => Ok(ParamKind::Natural),
            other => Err(Error::Config(format!("unknown parametrization kind '{other}' (valid: arc, natural)"))),
        }
    }
}

/// Radial derivatives of `φ_k(z) = (i/4)H₀⁽¹⁾(k|z|)` at one point.
struct Radial {
    value: C64,
    grad: [C64; 2],
    hess: [[C64; 2]; 2],
}

fn helmholtz_radial(k: f64, z: [f64; 2]) -> Radial {
    let r = z[0].hypot(z[1]);
    let kr = k * r;
    let c = cylinder(kr);
    let (h0, h1, h2) = (c.h0(), c.h1(), c.h2(kr));
    let u = [z[0] / r, z[1] / r];
    let g = -I * k / 4.0 * h1;
    // ∇∇ᵀH₀(k|z|) = −k²(H₁(kr)/(kr)·I − H₂(kr)·ẑẑᵀ).
    let a = I / 4.0 * (-k * k);
    let hess = std::array::from_fn(|i| {
        std::array::from_fn(|j| a * ((if i == j { h1 / kr } else { C64::new(0.0, 0.0) }) - h2 * (u[i] * u[j])))
    });
    Radial { value: I / 4.0 * h0, grad: [g * u[0], g * u[1]], hess }
}

/// Navier fundamental matrix `Φ(x) = (1/μ)φ_{k_s}(|x|)I + (1/ω²)∇∇ᵀ(φ_{k_s} − φ_{k_p})(|x|)`.
pub fn fundamental_matrix(params: &ProblemParams, x: [f64; 2]) -> Result<[[C64; 2]; 2]> {
    if x[0].hypot(x[1]) < 1e-12 {
        return Err(Error::Domain(format!("fundamental matrix is singular at ({}, {})", x[0], x[1])));
    }
    let s = helmholtz_radial(params.k_s, x);
    let p = helmholtz_radial(params.k_p, x);
    let w2 = params.omega * params.omega;
    Ok(std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let diag = if i == j { s.value / params.mu } else { C64::new(0.0, 0.0) };
            diag + (s.hess[i][j] - p.hess[i][j]) / w2
        })
    }))
}

/// Incident field `u^inc(x) = Φ(x − x₀)·p` of a point source inside the scatterer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NavierPointSource {
    /// Source location `x₀` (inside the boundary).
    pub location: [f64; 2],
    /// Polarization vector `p`.
    pub polarization: [C64; 2],
    /// Physical problem parameters.
    pub params: ProblemParams,
}

impl NavierPointSource {
    /// Source at `location` with the default polarization `(1, 1)`.
    pub fn new(params: ProblemParams, location: [f64; 2]) -> Self {
        Self { location, polarization: [C64::new(1.0, 0.0); 2], params }
    }

    /// `u^inc(x)`.
    pub fn incident(&self, x: [f64; 2]) -> Result<[C64; 2]> {
        let phi = fundamental_matrix(&self.params, [x[0] - self.location[0], x[1] - self.location[1]])?;
        Ok(std::array::from_fn(|i| phi[i][0] * self.polarization[0] + phi[i][1] * self.polarization[1]))
    }

    /// The exact scattered field for Dirichlet data `−u^inc`: `u = −u^inc` outside.
    pub fn exact_scattered(&self, x: [f64; 2]) -> Result<[C64; 2]> {
        let u = self.incident(x)?;
        Ok([-u[0], -u[1]])
    }

    /// Checks that the source lies strictly inside `curve`.
    pub fn check_inside(&self, curve: &Curve) -> Result<()> {
        if curve.contains(self.location) {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "point source ({}, {}) must lie inside the boundary '{}'",
                self.location[0],
                self.location[1],
                curve.name()
            )))
        }
    }
}

/// Dirichlet data `(f_n, f_t) = (−u^inc·n̂, −u^inc·t̂)` at the nodes of `frames`,
/// evaluated at the physical points `scale·x(t_m)`.
pub fn boundary_data(frames: &[CurveFrame], source: &NavierPointSource, scale: f64) -> Result<(Vec<C64>, Vec<C64>)> {
    let mut f_n = Vec::with_capacity(frames.len());
    let mut f_t = Vec::with_capacity(frames.len());
    for f in frames {
        let u = source.incident([scale * f.x[0], scale * f.x[1]])?;
        f_n.push(-(u[0] * f.normal[0] + u[1] * f.normal[1]));
        f_t.push(-(u[0] * f.tangent[0] + u[1] * f.tangent[1]));
    }
    Ok((f_n, f_t))
}

/// `(φ_p, φ_s) = R_N(λ_p, λ_s)`.
pub fn recover_densities(report: &SolveReport, regularizer: &Mat<C64>) -> Result<(Vec<C64>, Vec<C64>)> {
    let lam = &report.solution;
    if regularizer.nrows() != lam.len() || regularizer.ncols() != lam.len() {
        return Err(Error::Precondition(format!("regularizer is {}×{}, unknowns have length {}", regularizer.nrows(), regularizer.ncols(), lam.len())));
    }
    let n = lam.len() / 2;
    let phi: Vec<C64> = (0..2 * n).map(|i| (0..2 * n).map(|j| regularizer[(i, j)] * lam[j]).sum()).collect();
    Ok((phi[..n].to_vec(), phi[n..].to_vec()))
}

fn apply(m: &Mat<C64>, v: &[C64]) -> Vec<C64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum()).collect()
}

/// Exterior displacement at a set of points, with its Helmholtz parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ExteriorField {
    /// Evaluation points.
    pub points: Vec<[f64; 2]>,
    /// `u = ∇u_p + vcurl u_s`.
    pub u: Vec<[C64; 2]>,
    /// `∇u_p`.
    pub pressure: Vec<[C64; 2]>,
    /// `vcurl u_s`.
    pub shear: Vec<[C64; 2]>,
    /// `u_p` (scalar potential).
    pub u_p: Vec<C64>,
    /// `u_s` (scalar potential).
    pub u_s: Vec<C64>,
}

/// Boundary densities of the combined potentials on an `N`-point grid.
#[derive(Debug, Clone)]
pub struct Densities {
    /// Node frames of the (length-`2π`) computational curve.
    pub frames: Vec<CurveFrame>,
    /// Pressure double-layer density `φ_p`.
    pub phi_p: Vec<C64>,
    /// Shear double-layer density `φ_s`.
    pub phi_s: Vec<C64>,
    /// Pressure single-layer density `Y_pφ_p`.
    pub psi_p: Vec<C64>,
    /// Shear single-layer density `Y_sφ_s`.
    pub psi_s: Vec<C64>,
    /// Wavenumbers on the computational curve.
    pub params: ProblemParams,
}

impl Densities {
    /// Builds the densities from `φ` and the assembled `Y` matrices.
    pub fn new(frames: Vec<CurveFrame>, params: ProblemParams, phi_p: Vec<C64>, phi_s: Vec<C64>, y_p: &Mat<C64>, y_s: &Mat<C64>) -> Result<Self> {
        let n = frames.len();
        if phi_p.len() != n || phi_s.len() != n || y_p.nrows() != n || y_s.nrows() != n {
            return Err(Error::Precondition("density and grid sizes differ".into()));
        }
        let psi_p = apply(y_p, &phi_p);
        let psi_s = apply(y_s, &phi_s);
        Ok(Self { frames, phi_p, phi_s, psi_p, psi_s, params })
    }

    /// `(u_k, ∇u_k)` at `x` for the combined potential with the given densities.
    fn potential(&self, k: f64, phi: &[C64], psi: &[C64], x: [f64; 2]) -> (C64, [C64; 2]) {
        let w = 2.0 * std::f64::consts::PI / self.frames.len() as f64;
        let mut val = C64::new(0.0, 0.0);
        let mut grad = [C64::new(0.0, 0.0); 2];
        for (m, f) in self.frames.iter().enumerate() {
            let z = [x[0] - f.x[0], x[1] - f.x[1]];
            let r = helmholtz_radial(k, z);
            let q = w * f.eta;
            let nn = f.normal;
            // DL kernel ∂_{n(y)}φ(x − y) = −∇φ(z)·n; its x-gradient is −Hφ(z)·n.
            let dl = -(r.grad[0] * nn[0] + r.grad[1] * nn[1]);
            val += q * (dl * phi[m] - r.value * psi[m]);
            for i in 0..2 {
                let dl_grad = -(r.hess[i][0] * nn[0] + r.hess[i][1] * nn[1]);
                grad[i] += q * (dl_grad * phi[m] - r.grad[i] * psi[m]);
            }
        }
        (val, grad)
    }

    /// Single- and double-layer parts evaluated separately (for diagnostics):
    /// returns `(SL_k[ψ](x), ∇SL_k[ψ](x))`.
    pub fn single_layer(&self, k: f64, psi: &[C64], x: [f64; 2]) -> (C64, [C64; 2]) {
        let zero = vec![C64::new(0.0, 0.0); psi.len()];
        let (v, g) = self.potential(k, &zero, psi, x);
        (-v, [-g[0], -g[1]])
    }

    /// Evaluates the field at points given in computational coordinates.
    /// No exclusion checks are performed.
    pub fn evaluate_unchecked(&self, points: &[[f64; 2]]) -> ExteriorField {
        let vals: Vec<_> = points
            .par_iter()
            .map(|&x| {
                let (up, gp) = self.potential(self.params.k_p, &self.phi_p, &self.psi_p, x);
                let (us, gs) = self.potential(self.params.k_s, &self.phi_s, &self.psi_s, x);
                let curl = [gs[1], -gs[0]];
                (up, us, gp, curl)
            })
            .collect();
        ExteriorField {
            points: points.to_vec(),
            u: vals.iter().map(|v| [v.2[0] + v.3[0], v.2[1] + v.3[1]]).collect(),
            pressure: vals.iter().map(|v| v.2).collect(),
            shear: vals.iter().map(|v| v.3).collect(),
            u_p: vals.iter().map(|v| v.0).collect(),
            u_s: vals.iter().map(|v| v.1).collect(),
        }
    }
}

/// Standard probe set: `count` equispaced points on the circle of radius `radius`.
pub fn probe_circle(count: usize, radius: f64) -> Vec<[f64; 2]> {
    (0..count)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / count as f64;
            [radius * t.cos(), radius * t.sin()]
        })
        .collect()
}

/// Default probe set: 1024 points on the circle of radius 4.
pub fn default_probes() -> Vec<[f64; 2]> {
    probe_circle(1024, 4.0)
}

/// `max_j |u_computed(x_j) − u_exact(x_j)|` (Euclidean norm of the 2-vector difference).
pub fn farfield_error(field: &ExteriorField, source: &NavierPointSource) -> Result<f64> {
    let mut err: f64 = 0.0;
    for (x, u) in field.points.iter().zip(&field.u) {
        let e = source.exact_scattered(*x)?;
        err = err.max(((u[0] - e[0]).norm_sqr() + (u[1] - e[1]).norm_sqr()).sqrt());
    }
    Ok(err)
}

/// Writes `x, y, Re u₁, Im u₁, Re u₂, Im u₂` rows with 17 significant digits.
pub fn write_field_csv(field: &ExteriorField, mut w: impl Write) -> Result<()> {
    writeln!(w, "x,y,re_u1,im_u1,re_u2,im_u2")?;
    for (x, u) in field.points.iter().zip(&field.u) {
        writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", x[0], x[1], u[0].re, u[0].im, u[1].re, u[1].im)?;
    }
    Ok(())
}

/// A scattering problem on a physical curve.
#[derive(Debug, Clone)]
pub struct Problem {
    /// Physical boundary curve.
    pub curve: Curve,
    /// Physical parameters.
    pub params: ProblemParams,
    /// Parametrization/formulation.
    pub kind: ParamKind,
    /// Apply the regularizer (`false` solves the combined-field system itself).
    pub regularized: bool,
    /// Auxiliary nodes for arc-length resampling.
    pub arc_nodes: usize,
}

impl Problem {
    /// Regularized problem with default resampling.
    pub fn new(curve: Curve, params: ProblemParams, kind: ParamKind) -> Self {
        Self { curve, params, kind, regularized: true, arc_nodes: DEFAULT_ARC_NODES }
    }

    /// The computational curve (length `2π`, resampled for [`ParamKind::Arc`]),
    /// its parameters, and the physical-to-computational length ratio `s = L/(2π)`.
    pub fn discretization(&self) -> Result<Discretization> {
        let length = self.curve.length();
        let s = length / (2.0 * std::f64::consts::PI);
        let (curve, params) = if (length - 2.0 * std::f64::consts::PI).abs() > LENGTH_TOLERANCE {
            (self.curve.scaled(1.0 / s)?, self.params.rescale_wavenumbers(length)?)
        } else {
            (self.curve.clone(), self.params)
        };
        let curve = match self.kind {
            ParamKind::Arc => arclength_reparametrize(&curve, self.arc_nodes)?,
            ParamKind::Natural => curve,
        };
        let scale = if (length - 2.0 * std::f64::consts::PI).abs() > LENGTH_TOLERANCE { s } else { 1.0 };
        Ok(Discretization { curve, params, scale, kind: self.kind, regularized: self.regularized })
    }
}

/// The length-`2π` computational problem derived from a [`Problem`].
#[derive(Debug, Clone)]
pub struct Discretization {
    /// Computational curve.
    pub curve: Curve,
    /// Computational parameters (wavenumbers rescaled).
    pub params: ProblemParams,
    /// Physical = `scale` × computational coordinates.
    pub scale: f64,
    /// Parametrization/formulation.
    pub kind: ParamKind,
    /// Whether the regularizer is applied.
    pub regularized: bool,
}

impl Discretization {
    /// Assembles the `N`-point system.
    pub fn assemble(&self, n: usize) -> Result<SystemMatrix> {
        match self.kind {
            ParamKind::Arc => assemble_system_arclength(&self.params, &self.curve, n, self.regularized),
            ParamKind::Natural => assemble_system_general(&self.params, &self.curve, n, self.regularized),
        }
    }
}

/// Result of the full pipeline for one `N`.
#[derive(Debug, Clone)]
pub struct Solution {
    /// Assembled system.
    pub system: SystemMatrix,
    /// Linear-solve report.
    pub report: SolveReport,
    /// Recovered densities.
    pub densities: Densities,
    /// Physical = `scale` × computational coordinates.
    pub scale: f64,
    /// The physical curve (for exclusion checks).
    pub curve: Curve,
    /// Assembly time.
    pub assemble_time: Duration,
}

impl Solution {
    /// Evaluates the scattered field at physical points outside the boundary.
    ///
    /// Fails with [`Error::InteriorPoint`] for points inside and
    /// [`Error::NearField`] for points closer than [`NEAR_FIELD_BAND`].
    pub fn evaluate(&self, points: &[[f64; 2]]) -> Result<ExteriorField> {
        for &p in points {
            if self.curve.contains(p) {
                return Err(Error::InteriorPoint { x: p[0], y: p[1] });
            }
            let d = self.curve.distance_to(p);
            if d < NEAR_FIELD_BAND {
                return Err(Error::NearField { x: p[0], y: p[1], distance: d, band: NEAR_FIELD_BAND });
            }
        }
        let local: Vec<[f64; 2]> = points.iter().map(|p| [p[0] / self.scale, p[1] / self.scale]).collect();
        let mut field = self.densities.evaluate_unchecked(&local);
        // u(x) = ũ(x/s) for the displacement; the potentials scale by s.
        field.points = points.to_vec();
        for v in field.u_p.iter_mut().chain(field.u_s.iter_mut()) {
            *v *= self.scale;
        }
        Ok(field)
    }
}

/// Pipeline stage at which a failure occurred.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Source placement, rescaling and reparametrization.
    Setup,
    /// System assembly.
    Assemble,
    /// Boundary data and the linear solve.
    Solve,
    /// Density recovery and field evaluation.
    Evaluate,
}

impl Stage {
    /// Lower-case stage name for diagnostics.
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Setup => "setup",
            Stage::Assemble => "assemble",
            Stage::Solve => "solve",
            Stage::Evaluate => "evaluate",
        }
    }
}

/// Assemble → solve → recover densities for one grid size.
pub fn run_pipeline(problem: &Problem, source: &NavierPointSource, n: usize, solver: SolverKind, tol: f64) -> Result<Solution> {
    run_pipeline_staged(problem, source, n, solver, tol).map_err(|(_, e)| e)
}

/// [`run_pipeline`], tagging a failure with the stage it occurred in.
pub fn run_pipeline_staged(
    problem: &Problem,
    source: &NavierPointSource,
    n: usize,
    solver: SolverKind,
    tol: f64,
) -> std::result::Result<Solution, (Stage, Error)> {
    let tag = |stage: Stage| move |e: Error| (stage, e);
    source.check_inside(&problem.curve).map_err(tag(Stage::Setup))?;
    let disc = problem.discretization().map_err(tag(Stage::Setup))?;
    let start = Instant::now();
    let system = disc.assemble(n).map_err(tag(Stage::Assemble))?;
    let assemble_time = start.elapsed();
    let frames = disc.curve.node_frames(n).map_err(tag(Stage::Solve))?;
    let (f_n, f_t) = boundary_data(&frames, source, disc.scale).map_err(tag(Stage::Solve))?;
    let rhs: Vec<C64> = f_n.into_iter().chain(f_t).collect();
    let report = solve(system.matrix.as_ref(), &rhs, solver, tol).map_err(tag(Stage::Solve))?;
    let (phi_p, phi_s) = recover_densities(&report, &system.regularizer).map_err(tag(Stage::Evaluate))?;
    let densities =
        Densities::new(frames, disc.params, phi_p, phi_s, &system.y_p, &system.y_s).map_err(tag(Stage::Evaluate))?;
    Ok(Solution { system, report, densities, scale: disc.scale, curve: problem.curve.clone(), assemble_time })
}
