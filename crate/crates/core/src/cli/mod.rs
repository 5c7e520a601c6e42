//! `triadlab` command line: argument definitions, exit codes and the
//! machine-readable error channel.

pub mod commands;
pub mod config;
pub mod io;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::path::PathBuf;

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "triadlab", version, about = "Resonant triads, rigid-body dynamics and burst bounds")]
pub struct Cli {
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// No randomness is used anywhere; accepted for forward compatibility.
    #[arg(long, global = true)]
    pub seedless: bool,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lattice resonance search, resonance curves and primitive decomposition.
    #[command(subcommand)]
    Triads(TriadsCmd),
    /// Integrate one run configuration.
    Simulate(SimulateArgs),
    /// Compare a stored trajectory against the closed-form predictions.
    #[command(subcommand)]
    Analyze(AnalyzeCmd),
    /// Run several configurations concurrently.
    Sweep(SweepArgs),
}

#[derive(Debug, Subcommand)]
pub enum TriadsCmd {
    /// Enumerate resonant irreducible triads in a box.
    Search(SearchArgs),
    /// Track θ3/θ1 along a θ2/θ1 grid for a fixed pair.
    Curve(CurveArgs),
    /// Split a degenerate pair into primitive data.
    Decompose(DecomposeArgs),
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, value_parser = io::parse_theta)]
    pub theta: [f64; 3],
    #[arg(long = "box")]
    pub box_size: i64,
    #[arg(long, default_value_t = crate::lattice::DEFAULT_SEARCH_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long, value_parser = io::parse_vector, allow_hyphen_values = true)]
    pub k: [i64; 3],
    #[arg(long, value_parser = io::parse_vector, allow_hyphen_values = true)]
    pub m: [i64; 3],
    /// Optional check value; must equal k + m.
    #[arg(long, value_parser = io::parse_vector, allow_hyphen_values = true)]
    pub n: Option<[i64; 3]>,
    /// `lo:hi:steps` for θ2/θ1.
    #[arg(long, value_parser = io::parse_grid)]
    pub grid: io::Grid,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long, value_parser = io::parse_vector, allow_hyphen_values = true)]
    pub k: [i64; 3],
    #[arg(long, value_parser = io::parse_vector, allow_hyphen_values = true)]
    pub m: [i64; 3],
    #[arg(long)]
    pub i: usize,
    #[arg(long)]
    pub j: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub config: PathBuf,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    #[arg(long)]
    pub sample_dt: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    H3,
    Enstrophy,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCmd {
    /// Measured burst ratio and first passage against the bounds.
    Burst {
        trajectory: PathBuf,
        /// Defaults to the norm matching the initial recipe.
        #[arg(long, value_enum)]
        norm: Option<NormArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measured half period against quadrature.
    Period {
        trajectory: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduced Hamiltonian drift per sign-fixed segment.
    Hamiltonian {
        trajectory: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(required = true)]
    pub configs: Vec<PathBuf>,
}

/// Failure surfaced to the user: exit code plus the JSON error record.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            kind: "usage".into(),
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> String {
        json!({
            "schema": crate::SCHEMA_VERSION,
            "error": {"code": self.code, "kind": self.kind, "message": self.message}
        })
        .to_string()
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) => EXIT_USAGE,
            Error::Catalytic(_) | Error::NotDegenerate(_) | Error::Reducible(_) | Error::Inconsistent(_) => {
                EXIT_PRECONDITION
            }
            Error::Integration { .. } => EXIT_NUMERICAL,
        };
        CliError {
            code,
            kind: e.kind().into(),
            message: e.to_string(),
        }
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
/// Output goes to stdout; errors go to stderr as one JSON line.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            let err = CliError::usage(e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return EXIT_USAGE;
        }
    };
    match commands::run(&cli) {
        Ok(out) => {
            if !out.is_empty() {
                println!("{out}");
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.code
        }
    }
}
