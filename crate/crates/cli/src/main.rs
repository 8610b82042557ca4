//! `snspd` — nanowire-detector dose, thermal, and surface analysis.
//!
//! Every run is deterministic: the same config and seed produce
//! byte-identical outputs. Exit codes: 0 success, 2 configuration or
//! usage error, 3 numerical failure (non-convergence, failed fit).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod output;
mod records;

use error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "snspd", version, about = "Nanowire detector dose, thermal, and surface analysis")]
struct Cli {
    /// Scenario configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for generated files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps; 0 or omitted means all cores.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit lateral received-fraction and stopping-depth profiles.
    Dose,
    /// Run one hotspot transient plus the retrapping-current search.
    Simulate,
    /// Invert a measured retrapping current to the thermal coupling σ.
    ExtractSigma,
    /// Fit an error-function sigmoid to a count-rate curve.
    FitCounts(commands::counts::Args),
    /// Roughness, elevation-onset, or dark-contrast metrics.
    AnalyzeSurface(commands::surface::Args),
    /// Evaluate the fluence curve over a list of values.
    Sweep,
    /// Re-run a named built-in analysis.
    Reproduce(commands::reproduce::Args),
    /// Tabulate several fit records side by side.
    Compare(commands::compare::Args),
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Dose => commands::dose::run(cli.config.as_deref(), cli.out.as_deref()),
        Command::Simulate => commands::simulate::run(cli.config.as_deref(), cli.out.as_deref()),
        Command::ExtractSigma => {
            commands::sigma::run(cli.config.as_deref(), cli.out.as_deref())
        }
        Command::FitCounts(args) => commands::counts::run(&args, cli.out.as_deref()),
        Command::AnalyzeSurface(args) => commands::surface::run(&args, cli.out.as_deref()),
        Command::Sweep => {
            commands::sweep::run(cli.config.as_deref(), cli.out.as_deref(), cli.workers)
        }
        Command::Reproduce(args) => commands::reproduce::run(&args, cli.out.as_deref()),
        Command::Compare(args) => commands::compare::run(&args, cli.out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
