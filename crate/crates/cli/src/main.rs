//! `ndlab`: bound sweeps, protocol generation, worst-case analysis and
//! collision simulation for duty-cycled neighbor discovery.

mod analyze;
mod bounds;
mod error;
mod generate;
mod simulate;
mod units;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "ndlab", version, about = "Neighbor-discovery latency bounds, schedules and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate latency bounds over a duty-cycle grid (CSV).
    Bounds(bounds::BoundsArgs),
    /// Emit a protocol schedule as JSON.
    Generate(generate::GenerateArgs),
    /// Coverage verdict and worst-case latency of a transmitter/receiver pair (JSON).
    Analyze(analyze::AnalyzeArgs),
    /// Multi-device collision simulation (CSV + JSON summary).
    Simulate(simulate::SimulateArgs),
}

/// Applies `ND_LAB_THREADS` to the global worker pool.
fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("ND_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::usage(format!("ND_LAB_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::usage(format!("cannot size thread pool: {e}")))
}

fn run(cli: &Cli) -> CliResult<()> {
    configure_threads()?;
    match &cli.command {
        Command::Bounds(a) => bounds::run(a),
        Command::Generate(a) => generate::run(a),
        Command::Analyze(a) => analyze::run(a),
        Command::Simulate(a) => simulate::run(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::usage(e.render().to_string().trim_end());
            eprintln!("{}", err.diagnostic());
            return ExitCode::from(err.kind.exit_code() as u8);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.diagnostic());
            ExitCode::from(err.kind.exit_code() as u8)
        }
    }
}
