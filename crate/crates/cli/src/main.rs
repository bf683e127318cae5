//! `flatpoly`: generate polynomial families and run flatness diagnostics.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on domain errors.

mod commands;
mod family;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use flatpoly::FlatError;

use family::FamilyArgs;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(FlatError),
    Io(String),
}

impl From<FlatError> for CliError {
    fn from(e: FlatError) -> Self {
        CliError::Domain(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Domain(_) | CliError::Io(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "io: {m}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "flatpoly", version, about = "Flatness diagnostics for trigonometric polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output file; stdout when absent.
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Grid size M (a power of two). Defaults to $FLATPOLY_GRID, then to a
    /// size derived from the polynomial.
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write one family member as JSON.
    Generate {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Flatness report for each input polynomial.
    Analyze {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        grid: GridArgs,
        /// Threshold for the measure of {||P| - 1| > tau}.
        #[arg(long, default_value_t = 0.5)]
        tau: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Inner/outer factorization of an analytic polynomial.
    Factor {
        input: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Ratio table over a family sequence.
    Sweep {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Partial Riesz products of one polynomial at dissociated scales.
    Riesz {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// `greedy` or `geometric:B` (scales B, B², …).
        #[arg(long, default_value = "geometric:3")]
        scales: String,
        /// Also write the l1 trace CSV here.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Singularity series over a family sequence.
    Singularity {
        #[command(flatten)]
        family: FamilyArgs,
        /// Repeat a single polynomial this many times instead of sweeping.
        #[arg(long)]
        depth: Option<usize>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Grid sup norms against van der Corput bounds (gauss and hl).
    VdcCheck {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Egorov-style subsequence selection over a family sequence.
    Egorov {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Convert a CSV table to a whitespace-separated .dat file.
    Plot {
        input: PathBuf,
        /// Columns to keep, comma separated.
        #[arg(long)]
        columns: String,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate { family, out } => commands::generate(&family, &out),
        Command::Analyze {
            inputs,
            grid,
            tau,
            out,
        } => commands::analyze(&inputs, &grid, tau, &out),
        Command::Factor { input, grid, out } => commands::factor(&input, &grid, &out),
        Command::Sweep { family, grid, out } => commands::sweep(&family, &grid, &out),
        Command::Riesz {
            family,
            depth,
            scales,
            trace,
            grid,
            out,
        } => commands::riesz(&family, depth, &scales, trace.as_deref(), &grid, &out),
        Command::Singularity {
            family,
            depth,
            grid,
            out,
        } => commands::singularity(&family, depth, &grid, &out),
        Command::VdcCheck { family, grid, out } => commands::vdc_check(&family, &grid, &out),
        Command::Egorov { family, grid, out } => commands::egorov(&family, &grid, &out),
        Command::Plot {
            input,
            columns,
            output,
        } => commands::plot(&input, &columns, output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
