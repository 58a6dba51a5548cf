//! Command-line experiment runner.
//!
//! ```text
//! navier-bie <solve|convergence|gmres-study|spectrum|condition> [--config FILE] [flags]
//! ```
//!
//! Tables are printed to stdout as CSV and, with `--out DIR`, also written to
//! `DIR/<command>.csv`. Exit status: 0 on success, 2 for configuration or
//! usage errors, 3 for numerical failures.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use navier_bie::experiment::{
    csv_string, run_condition, run_convergence, run_gmres_study, run_solve, run_spectrum, write_atomically,
    ExperimentConfig, Overrides, StudyError,
};
use navier_bie::fields::ParamKind;
use navier_bie::solve::SolverKind;

#[derive(Parser, Debug)]
#[command(name = "navier-bie", version, about = "Regularized boundary integral solver for 2D elastic scattering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full pipeline per N: one CSV row with iterations, residual, far-field error and timings.
    Solve(Flags),
    /// Error-versus-N table with observed orders and a fitted slope per case.
    Convergence(Flags),
    /// GMRES iteration counts per geometry, frequency and N.
    GmresStudy(Flags),
    /// Eigenvalues of the system matrix and their clustering about the accumulation points.
    Spectrum(Flags),
    /// Condition numbers of the regularized and combined-field systems.
    Condition(Flags),
}

#[derive(clap::Args, Debug)]
struct Flags {
    /// TOML experiment file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Geometry name(s): ellipse, kite, cavity (comma separated).
    #[arg(long, value_delimiter = ',')]
    geometry: Option<Vec<String>>,
    /// Boundary parametrization.
    #[arg(long = "param-kind")]
    param_kind: Option<ParamKind>,
    /// Frequency/frequencies ω (comma separated).
    #[arg(long, value_delimiter = ',')]
    omega: Option<Vec<f64>>,
    /// Grid sizes (comma separated, even, ≥ 16).
    #[arg(long = "N", value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Linear solver.
    #[arg(long)]
    solver: Option<SolverKind>,
    /// GMRES relative-residual tolerance, in (0, 1e-3].
    #[arg(long)]
    tol: Option<f64>,
    /// Output directory for CSV files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Solve the combined-field system without the regularizer.
    #[arg(long)]
    unregularized: bool,
    /// Complexification offset ε for both wavenumbers.
    #[arg(long)]
    eps: Option<f64>,
}

impl Flags {
    fn into_config(self) -> Result<ExperimentConfig, StudyError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path).map_err(config_error)?,
            None => ExperimentConfig::default(),
        };
        cfg.apply(Overrides {
            geometry: self.geometry,
            param_kind: self.param_kind,
            omega: self.omega,
            n: self.n,
            solver: self.solver,
            tol: self.tol,
            out: self.out,
            unregularized: self.unregularized,
            eps: self.eps,
        });
        Ok(cfg)
    }
}

fn config_error(error: navier_bie::error::Error) -> StudyError {
    StudyError { stage: "config", context: String::new(), error }
}

/// Prints a table and writes it under the output directory, if any.
fn emit(dir: Option<&Path>, name: &str, text: &str) -> Result<(), StudyError> {
    print!("{text}");
    if let Some(dir) = dir {
        let path = dir.join(name);
        write_atomically(&path, text.as_bytes())
            .map_err(|error| StudyError { stage: "output", context: path.display().to_string(), error })?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn write_only(dir: Option<&Path>, name: &str, text: &str) -> Result<(), StudyError> {
    if let Some(dir) = dir {
        let path = dir.join(name);
        write_atomically(&path, text.as_bytes())
            .map_err(|error| StudyError { stage: "output", context: path.display().to_string(), error })?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn run(command: Command) -> Result<(), StudyError> {
    match command {
        Command::Solve(flags) => {
            let cfg = flags.into_config()?;
            let rows = run_solve(&cfg)?;
            emit(cfg.output.dir.as_deref(), "solve.csv", &csv_string(&rows))
        }
        Command::Convergence(flags) => {
            let cfg = flags.into_config()?;
            let (rows, slopes) = run_convergence(&cfg)?;
            let dir = cfg.output.dir.as_deref();
            emit(dir, "convergence.csv", &csv_string(&rows))?;
            println!();
            emit(dir, "convergence_slopes.csv", &csv_string(&slopes))
        }
        Command::GmresStudy(flags) => {
            let cfg = flags.into_config()?;
            let rows = run_gmres_study(&cfg)?;
            emit(cfg.output.dir.as_deref(), "gmres_study.csv", &csv_string(&rows))
        }
        Command::Spectrum(flags) => {
            let cfg = flags.into_config()?;
            let rows = run_spectrum(&cfg)?;
            let dir = cfg.output.dir.as_deref();
            for r in &rows {
                write_only(dir, &r.file_name(), &r.eigenvalue_csv())?;
            }
            emit(dir, "spectrum.csv", &csv_string(&rows))
        }
        Command::Condition(flags) => {
            let cfg = flags.into_config()?;
            let rows = run_condition(&cfg)?;
            emit(cfg.output.dir.as_deref(), "condition.csv", &csv_string(&rows))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("navier-bie: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
