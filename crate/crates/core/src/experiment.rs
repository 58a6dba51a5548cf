//! Batch experiments: configuration files, the five studies run by the
//! command-line front end, and their CSV output.
//!
//! A configuration is a TOML document with the sections `[problem]`,
//! `[solver]`, `[study]`, `[probes]` and `[output]`; every key has a default
//! and command-line flags override file values. Studies are deterministic:
//! nothing in the pipeline draws random numbers.
//!
//! All floating-point CSV fields are written with 17 significant digits.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use num_complex::Complex64 as C64;
use serde::Deserialize;

use crate::assembly::hps_eigenvalues;
use crate::error::{Error, Result};
use crate::fields::{
    default_source_for, farfield_error, probe_circle, run_pipeline_staged, NavierPointSource, ParamKind, Problem, Stage,
    DEFAULT_ARC_NODES,
};
use crate::geometry::{builtin_curve, Curve, FourierCurveSpec, BUILTIN_NAMES};
use crate::params::ProblemParams;
use crate::solve::{cluster_fraction, condition_number, spectrum, SolverKind, DEFAULT_GMRES_TOL};

/// Errors below this far-field error count as the machine-precision plateau.
pub const PLATEAU_ERROR: f64 = 1e-12;

/// GMRES counts whose trailing three values lie within `±GMRES_PLATEAU_BAND`
/// of their midpoint are flagged as a plateau.
pub const GMRES_PLATEAU_BAND: usize = 3;

/// Largest accepted GMRES / solver tolerance.
pub const MAX_TOLERANCE: f64 = 1e-3;

/// Smallest accepted grid size.
pub const MIN_GRID: usize = 16;

/// A single value or a list, so `geometry = "kite"` and `geometry = ["kite", "cavity"]` both parse.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> From<OneOrMany<T>> for Vec<T> {
    fn from(v: OneOrMany<T>) -> Self {
        match v {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(xs) => xs,
        }
    }
}

fn one_or_many<'de, D, T>(d: D) -> std::result::Result<Vec<T>, D::Error>
where
    D: serde::Deserializer<'de>,
    T: Deserialize<'de>,
{
    OneOrMany::deserialize(d).map(Vec::from)
}

/// `[problem]`: geometry, parametrization and physical parameters.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemSection {
    /// Built-in geometry names (ignored when `curve_file` is set).
    #[serde(deserialize_with = "one_or_many")]
    pub geometry: Vec<String>,
    /// TOML file with Fourier coefficients of a custom curve (`x1_cos`, `x1_sin`, `x2_cos`, `x2_sin`, optional `name`).
    pub curve_file: Option<PathBuf>,
    /// Parametrization/formulation.
    pub param_kind: ParamKind,
    /// Frequencies `ω`.
    #[serde(deserialize_with = "one_or_many")]
    pub omega: Vec<f64>,
    /// First Lamé constant.
    pub lambda: f64,
    /// Shear modulus.
    pub mu: f64,
    /// Explicit pressure wavenumber (with `k_s`, overrides the Lamé constants).
    pub k_p: Option<f64>,
    /// Explicit shear wavenumber.
    pub k_s: Option<f64>,
    /// Complexification offset for both wavenumbers (default `0.4·k^{1/3}` each).
    pub eps: Option<f64>,
    /// Point-source location (default: a per-geometry interior point).
    pub source: Option<[f64; 2]>,
    /// Apply the regularizer.
    pub regularized: bool,
    /// Auxiliary nodes for arc-length resampling.
    pub arc_nodes: usize,
}

impl Default for ProblemSection {
    fn default() -> Self {
        Self {
            geometry: vec!["ellipse".into()],
            curve_file: None,
            param_kind: ParamKind::Natural,
            omega: vec![10.0],
            lambda: 2.0,
            mu: 3.0,
            k_p: None,
            k_s: None,
            eps: None,
            source: None,
            regularized: true,
            arc_nodes: DEFAULT_ARC_NODES,
        }
    }
}

/// `[solver]`: linear solver settings.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    /// Linear solver.
    pub kind: SolverKind,
    /// GMRES relative-residual tolerance.
    pub tol: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self { kind: SolverKind::Gmres, tol: DEFAULT_GMRES_TOL }
    }
}

/// `[study]`: the grid sizes to sweep.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudySection {
    /// Grid sizes `N`.
    pub n: Vec<usize>,
}

/// `[probes]`: the far-field probe circle.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeSection {
    /// Number of equispaced probe points.
    pub count: usize,
    /// Circle radius.
    pub radius: f64,
}

impl Default for ProbeSection {
    fn default() -> Self {
        Self { count: 1024, radius: 4.0 }
    }
}

/// `[output]`: where result files go.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// Output directory (tables are only printed when unset).
    pub dir: Option<PathBuf>,
}

/// A complete experiment description.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Problem definition.
    pub problem: ProblemSection,
    /// Solver settings.
    pub solver: SolverSection,
    /// Sweep definition.
    pub study: StudySection,
    /// Probe set.
    pub probes: ProbeSection,
    /// Output location.
    pub output: OutputSection,
    /// Directory relative paths in the file are resolved against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

/// Command-line values that take precedence over the configuration file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    /// Geometry names.
    pub geometry: Option<Vec<String>>,
    /// Parametrization.
    pub param_kind: Option<ParamKind>,
    /// Frequencies.
    pub omega: Option<Vec<f64>>,
    /// Grid sizes.
    pub n: Option<Vec<usize>>,
    /// Solver.
    pub solver: Option<SolverKind>,
    /// Tolerance.
    pub tol: Option<f64>,
    /// Output directory.
    pub out: Option<PathBuf>,
    /// Disable the regularizer.
    pub unregularized: bool,
    /// Complexification offset.
    pub eps: Option<f64>,
}

impl ExperimentConfig {
    /// Parses a TOML document; diagnostics carry the line and key.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("invalid configuration: {e}")))
    }

    /// Reads and parses a configuration file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read configuration '{}': {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    /// Applies command-line overrides.
    pub fn apply(&mut self, o: Overrides) {
        if let Some(g) = o.geometry {
            self.problem.geometry = g;
            self.problem.curve_file = None;
        }
        if let Some(k) = o.param_kind {
            self.problem.param_kind = k;
        }
        if let Some(w) = o.omega {
            self.problem.omega = w;
        }
        if let Some(n) = o.n {
            self.study.n = n;
        }
        if let Some(s) = o.solver {
            self.solver.kind = s;
        }
        if let Some(t) = o.tol {
            self.solver.tol = t;
        }
        if let Some(d) = o.out {
            self.output.dir = Some(d);
        }
        if o.unregularized {
            self.problem.regularized = false;
        }
        if let Some(e) = o.eps {
            self.problem.eps = Some(e);
        }
    }

    /// Checks the sweep and solver settings.
    pub fn validate(&self) -> Result<()> {
        if self.study.n.is_empty() {
            return Err(Error::Config("the list of grid sizes N is empty".into()));
        }
        for &n in &self.study.n {
            if n < MIN_GRID || n % 2 != 0 {
                return Err(Error::Config(format!("grid size N must be even and at least {MIN_GRID}, got {n}")));
            }
        }
        let tol = self.solver.tol;
        if !(tol > 0.0 && tol <= MAX_TOLERANCE) {
            return Err(Error::Config(format!("tolerance must lie in (0, {MAX_TOLERANCE:e}], got {tol:e}")));
        }
        if self.problem.omega.is_empty() {
            return Err(Error::Config("the list of frequencies is empty".into()));
        }
        if self.problem.curve_file.is_none() && self.problem.geometry.is_empty() {
            return Err(Error::Config("no geometry given".into()));
        }
        if self.problem.k_p.is_some() != self.problem.k_s.is_some() {
            return Err(Error::Config("k_p and k_s must be given together".into()));
        }
        if !(self.probes.radius > 0.0) || self.probes.count == 0 {
            return Err(Error::Config("probe circle needs a positive radius and at least one point".into()));
        }
        Ok(())
    }

    /// The boundary curves of the study.
    pub fn curves(&self) -> Result<Vec<Curve>> {
        if let Some(file) = &self.problem.curve_file {
            let path = match &self.base_dir {
                Some(base) if file.is_relative() => base.join(file),
                _ => file.clone(),
            };
            return Ok(vec![load_curve_file(&path)?]);
        }
        self.problem.geometry.iter().map(|g| builtin_curve(g)).collect()
    }

    /// Physical parameters at frequency `omega`.
    pub fn params(&self, omega: f64) -> Result<ProblemParams> {
        match (self.problem.k_p, self.problem.k_s) {
            (Some(kp), Some(ks)) => ProblemParams::from_wavenumbers(omega, kp, ks, self.problem.eps),
            _ => ProblemParams::from_lame(omega, self.problem.lambda, self.problem.mu, self.problem.eps),
        }
    }

    fn problem(&self, curve: &Curve, omega: f64, regularized: bool) -> Result<Problem> {
        let mut p = Problem::new(curve.clone(), self.params(omega)?, self.problem.param_kind);
        p.regularized = regularized;
        p.arc_nodes = self.problem.arc_nodes;
        Ok(p)
    }

    fn source(&self, curve: &Curve, params: ProblemParams) -> NavierPointSource {
        NavierPointSource::new(params, self.problem.source.unwrap_or_else(|| default_source_for(curve.name())))
    }

    /// Every `(curve, ω)` pair of the sweep, in file order.
    fn cases(&self) -> Result<Vec<(Curve, f64)>> {
        let curves = self.curves()?;
        Ok(curves.iter().flat_map(|c| self.problem.omega.iter().map(move |&w| (c.clone(), w))).collect())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveFile {
    name: Option<String>,
    #[serde(default)]
    x1_cos: Vec<f64>,
    #[serde(default)]
    x1_sin: Vec<f64>,
    #[serde(default)]
    x2_cos: Vec<f64>,
    #[serde(default)]
    x2_sin: Vec<f64>,
}

/// Loads a custom curve from a TOML file of Fourier coefficients.
pub fn load_curve_file(path: &Path) -> Result<Curve> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read curve file '{}': {e}", path.display())))?;
    let file: CurveFile =
        toml::from_str(&text).map_err(|e| Error::Config(format!("invalid curve file '{}': {e}", path.display())))?;
    let name = file.name.unwrap_or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
    if BUILTIN_NAMES.contains(&name.as_str()) {
        return Err(Error::Config(format!("custom curve may not reuse the built-in name '{name}'")));
    }
    let spec = FourierCurveSpec { x1_cos: file.x1_cos, x1_sin: file.x1_sin, x2_cos: file.x2_cos, x2_sin: file.x2_sin };
    Curve::from_fourier(&name, &spec, 1.0)
}

/// A failure inside a study, tagged with the stage and the case it belongs to.
#[derive(Debug)]
pub struct StudyError {
    /// Stage at which the failure occurred (`config` for input errors).
    pub stage: &'static str,
    /// Case description (`geometry=…, ω=…, N=…`).
    pub context: String,
    /// Underlying error.
    pub error: Error,
}

impl StudyError {
    fn config(error: Error) -> Self {
        Self { stage: "config", context: String::new(), error }
    }

    /// Process exit code: 2 for configuration errors, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        if self.stage == "config" || self.error.is_config() {
            2
        } else {
            3
        }
    }
}

impl fmt::Display for StudyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.context.is_empty() {
            write!(f, "[{}] {}", self.stage, self.error)
        } else {
            write!(f, "[{}] {}: {}", self.stage, self.context, self.error)
        }
    }
}

impl std::error::Error for StudyError {}

/// Result type of the studies.
pub type StudyResult<T> = std::result::Result<T, StudyError>;

fn case_context(curve: &Curve, omega: f64, n: usize) -> String {
    format!("geometry={}, omega={omega}, N={n}", curve.name())
}

fn tagged(stage: Stage, curve: &Curve, omega: f64, n: usize) -> impl Fn(Error) -> StudyError + '_ {
    move |error| StudyError { stage: stage.as_str(), context: case_context(curve, omega, n), error }
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn ms(d: Duration) -> String {
    fmt_f64(d.as_secs_f64() * 1e3)
}

/// A row type with a fixed CSV schema.
pub trait CsvRow {
    /// Column names.
    fn header() -> &'static [&'static str];
    /// Field values, in header order.
    fn fields(&self) -> Vec<String>;
}

/// Writes a header line and one line per row.
pub fn write_csv<R: CsvRow>(rows: &[R], mut w: impl Write) -> Result<()> {
    writeln!(w, "{}", R::header().join(","))?;
    for r in rows {
        writeln!(w, "{}", r.fields().join(","))?;
    }
    Ok(())
}

/// Writes `bytes` to `path` via a temporary file and a rename, so readers
/// never observe a partially written table.
pub fn write_atomically(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Renders rows as CSV text.
pub fn csv_string<R: CsvRow>(rows: &[R]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}

/// One pipeline run (`solve` and `convergence`).
#[derive(Debug, Clone, PartialEq)]
pub struct SolveRow {
    /// Geometry name.
    pub geometry: String,
    /// Grid size.
    pub n: usize,
    /// Parametrization.
    pub kind: ParamKind,
    /// Frequency.
    pub omega: f64,
    /// Linear solver.
    pub solver: SolverKind,
    /// GMRES matrix–vector products (0 for the direct solver).
    pub iterations: usize,
    /// Achieved relative residual.
    pub residual: f64,
    /// Max far-field error on the probe circle.
    pub farfield_error: f64,
    /// Assembly wall time.
    pub assemble_time: Duration,
    /// Solve wall time.
    pub solve_time: Duration,
}

impl CsvRow for SolveRow {
    fn header() -> &'static [&'static str] {
        &["geometry", "N", "kind", "omega", "solver", "iterations", "residual", "farfield_error", "assemble_ms", "solve_ms"]
    }
    fn fields(&self) -> Vec<String> {
        vec![
            self.geometry.clone(),
            self.n.to_string(),
            self.kind.as_str().into(),
            fmt_f64(self.omega),
            self.solver.as_str().into(),
            self.iterations.to_string(),
            fmt_f64(self.residual),
            fmt_f64(self.farfield_error),
            ms(self.assemble_time),
            ms(self.solve_time),
        ]
    }
}

/// Runs the full pipeline for every geometry, frequency and `N`.
pub fn run_solve(cfg: &ExperimentConfig) -> StudyResult<Vec<SolveRow>> {
    cfg.validate().map_err(StudyError::config)?;
    let probes = probe_circle(cfg.probes.count, cfg.probes.radius);
    let mut rows = Vec::new();
    for (curve, omega) in cfg.cases().map_err(StudyError::config)? {
        let problem = cfg.problem(&curve, omega, cfg.problem.regularized).map_err(StudyError::config)?;
        let source = cfg.source(&curve, problem.params);
        for &n in &cfg.study.n {
            let sol = run_pipeline_staged(&problem, &source, n, cfg.solver.kind, cfg.solver.tol)
                .map_err(|(stage, e)| tagged(stage, &curve, omega, n)(e))?;
            let err = sol
                .evaluate(&probes)
                .and_then(|f| farfield_error(&f, &source))
                .map_err(tagged(Stage::Evaluate, &curve, omega, n))?;
            rows.push(SolveRow {
                geometry: curve.name().to_string(),
                n,
                kind: cfg.problem.param_kind,
                omega,
                solver: cfg.solver.kind,
                iterations: sol.report.iterations,
                residual: sol.report.residual,
                farfield_error: err,
                assemble_time: sol.assemble_time,
                solve_time: sol.report.wall_time,
            });
        }
    }
    Ok(rows)
}

/// A convergence-table row: a pipeline run plus the observed order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    /// The run.
    pub run: SolveRow,
    /// `−log(e_i/e_{i−1})/log(N_i/N_{i−1})` against the previous `N` of the
    /// same case, when the previous error is above the plateau.
    pub slope: Option<f64>,
    /// Error below [`PLATEAU_ERROR`].
    pub plateau: bool,
}

impl CsvRow for ConvergenceRow {
    fn header() -> &'static [&'static str] {
        &[
            "geometry", "N", "kind", "omega", "solver", "iterations", "residual", "farfield_error", "assemble_ms",
            "solve_ms", "slope", "plateau",
        ]
    }
    fn fields(&self) -> Vec<String> {
        let mut f = self.run.fields();
        f.push(self.slope.map(fmt_f64).unwrap_or_default());
        f.push(self.plateau.to_string());
        f
    }
}

/// Least-squares slope of `−log e` against `log N` over one case's
/// pre-plateau rows (`None` with fewer than two such rows).
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeSummary {
    /// Geometry name.
    pub geometry: String,
    /// Parametrization.
    pub kind: ParamKind,
    /// Frequency.
    pub omega: f64,
    /// Number of pre-plateau points used.
    pub points: usize,
    /// Fitted algebraic order.
    pub fitted_slope: Option<f64>,
}

impl CsvRow for SlopeSummary {
    fn header() -> &'static [&'static str] {
        &["geometry", "kind", "omega", "points", "fitted_slope"]
    }
    fn fields(&self) -> Vec<String> {
        vec![
            self.geometry.clone(),
            self.kind.as_str().into(),
            fmt_f64(self.omega),
            self.points.to_string(),
            self.fitted_slope.map(fmt_f64).unwrap_or_default(),
        ]
    }
}

/// Least-squares slope of `−log e` versus `log N` over the points with `e ≥ PLATEAU_ERROR`.
pub fn fitted_slope(points: &[(usize, f64)]) -> (usize, Option<f64>) {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, e)| *e >= PLATEAU_ERROR && e.is_finite())
        .map(|&(n, e)| ((n as f64).ln(), -e.ln()))
        .collect();
    if pts.len() < 2 {
        return (pts.len(), None);
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    (pts.len(), if sxx > 0.0 { Some(sxy / sxx) } else { None })
}

/// Error-versus-`N` table with consecutive slopes, plus a fitted slope per case.
pub fn run_convergence(cfg: &ExperimentConfig) -> StudyResult<(Vec<ConvergenceRow>, Vec<SlopeSummary>)> {
    let mut sorted = cfg.clone();
    sorted.study.n.sort_unstable();
    sorted.study.n.dedup();
    let runs = run_solve(&sorted)?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(runs.len());
    let mut summaries = Vec::new();
    for case in runs.chunks(sorted.study.n.len()) {
        let mut prev: Option<&SolveRow> = None;
        for r in case {
            let slope = prev.filter(|p| p.farfield_error >= PLATEAU_ERROR && r.farfield_error > 0.0).map(|p| {
                -(r.farfield_error / p.farfield_error).ln() / (r.n as f64 / p.n as f64).ln()
            });
            rows.push(ConvergenceRow { run: r.clone(), slope, plateau: r.farfield_error < PLATEAU_ERROR });
            prev = Some(r);
        }
        let pts: Vec<(usize, f64)> = case.iter().map(|r| (r.n, r.farfield_error)).collect();
        let (points, fitted) = fitted_slope(&pts);
        summaries.push(SlopeSummary {
            geometry: case[0].geometry.clone(),
            kind: case[0].kind,
            omega: case[0].omega,
            points,
            fitted_slope: fitted,
        });
    }
    Ok((rows, summaries))
}

/// GMRES iteration count for one case.
#[derive(Debug, Clone, PartialEq)]
pub struct GmresRow {
    /// Geometry name.
    pub geometry: String,
    /// Parametrization.
    pub kind: ParamKind,
    /// Frequency.
    pub omega: f64,
    /// Grid size.
    pub n: usize,
    /// Matrix–vector products to reach the tolerance.
    pub iterations: usize,
    /// Achieved relative residual.
    pub residual: f64,
    /// This and the two previous counts (by increasing `N`) lie within `±3` of their midpoint.
    pub plateau: bool,
}

impl CsvRow for GmresRow {
    fn header() -> &'static [&'static str] {
        &["geometry", "kind", "omega", "N", "iterations", "residual", "plateau"]
    }
    fn fields(&self) -> Vec<String> {
        vec![
            self.geometry.clone(),
            self.kind.as_str().into(),
            fmt_f64(self.omega),
            self.n.to_string(),
            self.iterations.to_string(),
            fmt_f64(self.residual),
            self.plateau.to_string(),
        ]
    }
}

/// True when the last three counts lie within `±GMRES_PLATEAU_BAND` of their midpoint.
pub fn counts_plateau(counts: &[usize]) -> bool {
    if counts.len() < 3 {
        return false;
    }
    let tail = &counts[counts.len() - 3..];
    let (lo, hi) = (tail.iter().min().unwrap(), tail.iter().max().unwrap());
    hi - lo <= 2 * GMRES_PLATEAU_BAND
}

/// GMRES iteration counts per geometry, frequency and `N` (the solver setting is forced to GMRES).
pub fn run_gmres_study(cfg: &ExperimentConfig) -> StudyResult<Vec<GmresRow>> {
    cfg.validate().map_err(StudyError::config)?;
    let mut ns = cfg.study.n.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut rows = Vec::new();
    for (curve, omega) in cfg.cases().map_err(StudyError::config)? {
        let problem = cfg.problem(&curve, omega, cfg.problem.regularized).map_err(StudyError::config)?;
        let source = cfg.source(&curve, problem.params);
        let mut counts = Vec::new();
        for &n in &ns {
            let sol = run_pipeline_staged(&problem, &source, n, SolverKind::Gmres, cfg.solver.tol)
                .map_err(|(stage, e)| tagged(stage, &curve, omega, n)(e))?;
            counts.push(sol.report.iterations);
            rows.push(GmresRow {
                geometry: curve.name().to_string(),
                kind: cfg.problem.param_kind,
                omega,
                n,
                iterations: sol.report.iterations,
                residual: sol.report.residual,
                plateau: counts_plateau(&counts),
            });
        }
    }
    Ok(rows)
}

/// Eigenvalue clustering summary for one case.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    /// Geometry name.
    pub geometry: String,
    /// Parametrization.
    pub kind: ParamKind,
    /// Frequency.
    pub omega: f64,
    /// Grid size.
    pub n: usize,
    /// Whether the regularizer was applied.
    pub regularized: bool,
    /// The two accumulation points `−(k_p²+k_s²)/2`, `−(k̃_p²+k̃_s²)/2`.
    pub centers: [C64; 2],
    /// Fraction of eigenvalues within `max(1, 0.05|c|)` of a centre.
    pub in_cluster_fraction: f64,
    /// All eigenvalues.
    pub eigenvalues: Vec<C64>,
}

impl SpectrumRow {
    /// File name of the eigenvalue table.
    pub fn file_name(&self) -> String {
        format!(
            "eigenvalues_{}_{}_omega{}_N{}{}.csv",
            self.geometry,
            self.kind.as_str(),
            self.omega,
            self.n,
            if self.regularized { "" } else { "_unregularized" }
        )
    }

    /// CSV of all eigenvalues (`re,im`).
    pub fn eigenvalue_csv(&self) -> String {
        let mut s = String::from("re,im\n");
        for z in &self.eigenvalues {
            s.push_str(&format!("{},{}\n", fmt_f64(z.re), fmt_f64(z.im)));
        }
        s
    }
}

impl CsvRow for SpectrumRow {
    fn header() -> &'static [&'static str] {
        &[
            "geometry", "kind", "omega", "N", "regularized", "center1_re", "center1_im", "center2_re", "center2_im",
            "eigenvalues", "in_cluster_fraction",
        ]
    }
    fn fields(&self) -> Vec<String> {
        vec![
            self.geometry.clone(),
            self.kind.as_str().into(),
            fmt_f64(self.omega),
            self.n.to_string(),
            self.regularized.to_string(),
            fmt_f64(self.centers[0].re),
            fmt_f64(self.centers[0].im),
            fmt_f64(self.centers[1].re),
            fmt_f64(self.centers[1].im),
            self.eigenvalues.len().to_string(),
            fmt_f64(self.in_cluster_fraction),
        ]
    }
}

/// Eigenvalues of the assembled system and their clustering about the accumulation points.
pub fn run_spectrum(cfg: &ExperimentConfig) -> StudyResult<Vec<SpectrumRow>> {
    cfg.validate().map_err(StudyError::config)?;
    let mut rows = Vec::new();
    for (curve, omega) in cfg.cases().map_err(StudyError::config)? {
        let problem = cfg.problem(&curve, omega, cfg.problem.regularized).map_err(StudyError::config)?;
        let disc = problem.discretization().map_err(tagged(Stage::Setup, &curve, omega, 0))?;
        let centers = hps_eigenvalues(&disc.params);
        for &n in &cfg.study.n {
            let sys = disc.assemble(n).map_err(tagged(Stage::Assemble, &curve, omega, n))?;
            let eigs = spectrum(sys.matrix.as_ref()).map_err(tagged(Stage::Solve, &curve, omega, n))?;
            rows.push(SpectrumRow {
                geometry: curve.name().to_string(),
                kind: cfg.problem.param_kind,
                omega,
                n,
                regularized: cfg.problem.regularized,
                centers,
                in_cluster_fraction: cluster_fraction(&eigs, &centers),
                eigenvalues: eigs,
            });
        }
    }
    Ok(rows)
}

/// Condition numbers of the regularized and combined-field systems.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionRow {
    /// Geometry name.
    pub geometry: String,
    /// Parametrization.
    pub kind: ParamKind,
    /// Frequency.
    pub omega: f64,
    /// Grid size.
    pub n: usize,
    /// 2-norm condition number with the regularizer.
    pub regularized: f64,
    /// 2-norm condition number with `R = I`.
    pub unregularized: f64,
}

impl CsvRow for ConditionRow {
    fn header() -> &'static [&'static str] {
        &["geometry", "kind", "omega", "N", "cond_regularized", "cond_unregularized"]
    }
    fn fields(&self) -> Vec<String> {
        vec![
            self.geometry.clone(),
            self.kind.as_str().into(),
            fmt_f64(self.omega),
            self.n.to_string(),
            fmt_f64(self.regularized),
            fmt_f64(self.unregularized),
        ]
    }
}

/// Condition numbers over `N` for both variants (the `regularized` setting is ignored).
pub fn run_condition(cfg: &ExperimentConfig) -> StudyResult<Vec<ConditionRow>> {
    cfg.validate().map_err(StudyError::config)?;
    let mut rows = Vec::new();
    for (curve, omega) in cfg.cases().map_err(StudyError::config)? {
        let cond = |regularized: bool, n: usize| -> StudyResult<f64> {
            let problem = cfg.problem(&curve, omega, regularized).map_err(StudyError::config)?;
            let disc = problem.discretization().map_err(tagged(Stage::Setup, &curve, omega, n))?;
            let sys = disc.assemble(n).map_err(tagged(Stage::Assemble, &curve, omega, n))?;
            condition_number(sys.matrix.as_ref()).map_err(tagged(Stage::Solve, &curve, omega, n))
        };
        for &n in &cfg.study.n {
            let regularized = cond(true, n)?;
            let unregularized = cond(false, n)?;
            rows.push(ConditionRow {
                geometry: curve.name().to_string(),
                kind: cfg.problem.param_kind,
                omega,
                n,
                regularized,
                unregularized,
            });
        }
    }
    Ok(rows)
}
