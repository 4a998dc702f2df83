//! `bidisk-pick`: solve, verify, classify and evaluate three-point Pick
//! problems on the bidisk.
//!
//! Exit codes: 0 success, 2 the data was classified away (degenerate,
//! two-point extremal or infeasible), 1 numerical failure, 64 bad input.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Solver(#[from] bidisk_pick::Error),
    /// Verification ran and some check failed.
    #[error("{0} check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 64,
            CliError::Solver(e) if e.is_invalid_input() => 64,
            CliError::Solver(e) if e.is_classification() => 2,
            CliError::Solver(_) | CliError::ChecksFailed(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "bidisk-pick",
    version,
    about = "Extremal three-point Pick interpolation on the bidisk"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// JSON file of solver settings (overrides a problem file's config).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one solver setting, e.g. --tol t_tol=1e-12 (repeatable).
    #[arg(long = "tol", value_name = "KEY=VALUE", global = true)]
    tol: Vec<String>,
    /// Write the main output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress messages on standard error and per-check report lines.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the extremal problem along the targets' scaling ray.
    Solve { problem: PathBuf },
    /// Re-check a solution file against its problem file.
    Verify { solution: PathBuf, problem: PathBuf },
    /// Classify the extremal problem determined by the data.
    Classify { problem: PathBuf },
    /// Evaluate a solution as CSV rows re(z1),im(z1),re(z2),im(z2),re(phi),im(phi),abs(phi).
    Eval {
        solution: PathBuf,
        /// A single point re(z1),im(z1),re(z2),im(z2).
        #[arg(long, allow_hyphen_values = true, conflicts_with = "grid")]
        at: Option<String>,
        /// Grid size per coordinate.
        #[arg(long, required_unless_present = "at")]
        grid: Option<usize>,
        /// Sample the torus instead of the open bidisk.
        #[arg(long, requires = "grid")]
        boundary: bool,
    },
    /// The symmetric example: nodes (0,0), (r,0), (0,r) with target
    /// direction (0,1,1), together with its known solution.
    Example {
        #[arg(long)]
        r: f64,
    },
    /// Kobayashi distance between two bidisk points and whether they are balanced.
    Distance {
        /// re(z1),im(z1),re(z2),im(z2)
        #[arg(allow_hyphen_values = true)]
        p: String,
        /// re(z1),im(z1),re(z2),im(z2)
        #[arg(allow_hyphen_values = true)]
        q: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let quiet = cli.global.quiet;
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !quiet || matches!(e, CliError::Input(_)) {
                eprintln!("bidisk-pick: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
