//! Command-line front end: parameter sweeps, table reproduction, gap scans,
//! scaling fits, and a built-in oracle suite. Exit codes: 0 success, 2
//! configuration error, 3 numerical failure.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod output;
mod selftest;

use commands::{ScalingArgs, WhichTransition};
use config::{CommonOpts, FINITE_DEFAULTS, INFINITE_DEFAULTS, TABLE_DEFAULTS};

/// Bipartite and genuine-multipartite entanglement of the XX chain with
/// three-spin interactions: analytic infinite-chain sweeps, finite-chain
/// exact diagonalization, and finite-size-scaling fits.
#[derive(Parser)]
#[command(name = "spinchain-multient", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Infinite-chain sweep: concurrence, G_n, GGM, and energy per site.
    InfiniteSweep {
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Saturation constants A_n of the constant regime, n = 2..=n-max.
    TableAn {
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Finite-chain sweep per N: energy, gap, magnetization, GGM, kinks.
    FiniteSweep {
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Energy-gap scan per N with refined near-closing locations.
    GapScan {
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Power-law fit of pseudo-critical points alpha_N ~ alpha_c + c N^-p.
    ScalingFit {
        #[command(flatten)]
        opts: CommonOpts,
        /// Inline points as N:alpha pairs, e.g. "8:2.6,10:1.7,12:1.4".
        #[arg(long)]
        points: Option<String>,
        /// finite-sweep CSV files carrying transition markers.
        files: Vec<std::path::PathBuf>,
        /// Assumed critical coupling.
        #[arg(long, default_value_t = 1.0)]
        alpha_c: f64,
        /// Which detected transition to read from CSV inputs.
        #[arg(long, value_enum, default_value_t = WhichTransition::Second)]
        which: WhichTransition,
    },
    /// Run the closed-form-vs-numeric oracle suite; nonzero exit on mismatch.
    Selftest {
        #[command(flatten)]
        opts: CommonOpts,
    },
}

/// Application error with its exit code.
#[derive(Debug)]
pub enum AppError {
    Config(String),
    Numerical(String),
}

impl AppError {
    fn code(&self) -> u8 {
        match self {
            AppError::Config(_) => 2,
            AppError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Config(m) => write!(f, "configuration error: {m}"),
            AppError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

fn run() -> Result<(), AppError> {
    let cli = Cli::parse();
    match &cli.command {
        Command::InfiniteSweep { opts } => {
            let r = config::resolve("infinite-sweep", opts, &INFINITE_DEFAULTS)?;
            commands::infinite_sweep(&r)
        }
        Command::TableAn { opts } => {
            let r = config::resolve("table-an", opts, &TABLE_DEFAULTS)?;
            commands::table_an(&r)
        }
        Command::FiniteSweep { opts } => {
            let r = config::resolve("finite-sweep", opts, &FINITE_DEFAULTS)?;
            commands::finite_sweep(&r)
        }
        Command::GapScan { opts } => {
            let r = config::resolve("gap-scan", opts, &FINITE_DEFAULTS)?;
            commands::gap_scan(&r)
        }
        Command::ScalingFit {
            opts,
            points,
            files,
            alpha_c,
            which,
        } => {
            let r = config::resolve("scaling-fit", opts, &FINITE_DEFAULTS)?;
            let args = ScalingArgs {
                points: points.clone(),
                files: files.clone(),
                alpha_c: *alpha_c,
                which: *which,
            };
            commands::scaling_fit(&r, &args)
        }
        Command::Selftest { opts } => {
            let r = config::resolve("selftest", opts, &FINITE_DEFAULTS)?;
            selftest::run(&r)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
