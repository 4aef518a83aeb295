//! `simplex-sections`: section volumes, densities, contour and Argand-plane
//! data dumps, and the verification suite.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 usage error,
//! 3 numerical failure.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use simplex_sections::{Error, IntegrationConfig};

#[derive(Parser, Debug)]
#[command(name = "simplex-sections", version, about = "Central sections of the regular simplex")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Volume of the central section with unit normal `a`.
    Volume(VolumeArgs),
    /// Density at zero of Σ u_j (Y_j - 1).
    Density(DensityArgs),
    /// Samples of the zero-phase contour y_u(x).
    ContourDump(ContourArgs),
    /// Modulus and argument of F_u on a rectangle of the complex plane.
    ArgandGrid(ArgandArgs),
    /// Runs verification checks; one JSON report per line.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, default_value_t = 1e-11)]
    pub abs_tol: f64,
    #[arg(long, default_value_t = 1e-11)]
    pub rel_tol: f64,
    /// Bound on the neglected tail of an unbounded contour.
    #[arg(long, default_value_t = 1e-10)]
    pub tail_eps: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

impl Common {
    pub fn config(&self) -> Result<IntegrationConfig, CliError> {
        let cfg = IntegrationConfig {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            tail_epsilon: self.tail_eps,
            ..IntegrationConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// A direction given either as comma-separated entries or as a facet normal.
#[derive(Args, Debug, Clone)]
pub struct DirectionArg {
    /// Comma-separated unit vector, e.g. "0.8,0.6".
    #[arg(long, allow_hyphen_values = true, conflicts_with = "facet")]
    pub dir: Option<String>,
    /// Facet normal of the n-simplex (n + 1 entries).
    #[arg(long, value_name = "N")]
    pub facet: Option<usize>,
}

#[derive(Args, Debug)]
pub struct VolumeArgs {
    /// Simplex dimension; the direction has n + 1 entries.
    #[arg(long)]
    pub n: usize,
    /// Use the facet normal of the n-simplex.
    #[arg(long, conflicts_with = "dir")]
    pub facet: bool,
    #[arg(long, allow_hyphen_values = true)]
    pub dir: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodArg {
    Contour,
    Realaxis,
    Pf,
    Mc,
    All,
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    #[command(flatten)]
    pub direction: DirectionArg,
    #[arg(long, value_enum, default_value_t = MethodArg::Contour)]
    pub method: MethodArg,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    /// Monte Carlo window half-width.
    #[arg(long, default_value_t = 0.01)]
    pub bandwidth: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct ContourArgs {
    #[command(flatten)]
    pub direction: DirectionArg,
    #[arg(long, allow_hyphen_values = true)]
    pub xmin: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub xmax: f64,
    /// Number of equally spaced samples, endpoints included.
    #[arg(long, default_value_t = 601)]
    pub resolution: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct ArgandArgs {
    #[command(flatten)]
    pub direction: DirectionArg,
    #[arg(long, allow_hyphen_values = true, default_value_t = -3.0)]
    pub re_min: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 3.0)]
    pub re_max: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = -3.0)]
    pub im_min: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 3.0)]
    pub im_max: f64,
    /// Points per axis, endpoints included.
    #[arg(long, default_value_t = 201)]
    pub resolution: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusArg {
    /// Seeded random and constructed directions (at least 200).
    Default,
    /// Facet normals for n = 2..=nmax.
    Facet,
    /// Constructed edge cases only.
    Edge,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Run every check.
    #[arg(long, conflicts_with = "check")]
    pub all: bool,
    /// Check to run (repeatable): lower_bound, contour_equivalence, pointwise,
    /// sandwich, ode, cauchy_schwarz, logderiv.
    #[arg(long)]
    pub check: Vec<String>,
    #[arg(long, value_enum, default_value_t = CorpusArg::Default, conflicts_with = "dir")]
    pub corpus: CorpusArg,
    /// Largest n of the facet corpus.
    #[arg(long, default_value_t = 8)]
    pub nmax: usize,
    /// Verify a single direction instead of a corpus.
    #[arg(long, allow_hyphen_values = true)]
    pub dir: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
    /// At least one verification check failed; the reports were still written.
    ChecksFailed,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_usage() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("cannot write output: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Volume(a) => commands::volume(&a),
        Command::Density(a) => commands::density(&a),
        Command::ContourDump(a) => commands::contour_dump(&a),
        Command::ArgandGrid(a) => commands::argand_grid(&a),
        Command::Verify(a) => commands::verify(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::ChecksFailed) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}
