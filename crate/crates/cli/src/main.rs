//! Command-line runner for the counterdiabatic driving toolkit.
//!
//! Exit codes: 0 on success, 1 on configuration or I/O errors, 2 when the
//! fuzz scenario detects a relation violation.

mod config;
mod csvout;
mod scenarios;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{resolve, Scenario, ScenarioConfig};

#[derive(Parser)]
#[command(
    name = "ctdrive",
    about = "Counterdiabatic driving sweeps, relation checks, and pulse synthesis",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// JSON configuration file; every field optional.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path (CSV, or the JSON report for fuzz; defaults to
    /// <scenario>.csv, stdout for fuzz).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional SVG plot path.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// RNG seed override for the fuzz scenario.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Cost rates and speeds over one sweep (reference parameters).
    Fig1(CommonArgs),
    /// Grid over sweep durations tau in {0.1, 1, 10, 100}.
    Fig2a(CommonArgs),
    /// Grid over splittings delta/kappa in {0.1, 1, 10, 100}.
    Fig2b(CommonArgs),
    /// Randomized relation battery; exits 2 on any violation.
    Fuzz(CommonArgs),
    /// Pulse synthesis and lab-frame tracking verification.
    NvPulse(CommonArgs),
    /// Fully configurable sweep, optionally with propagation fidelities.
    Custom(CommonArgs),
}

impl Command {
    fn split(self) -> (Scenario, CommonArgs) {
        match self {
            Command::Fig1(a) => (Scenario::Fig1, a),
            Command::Fig2a(a) => (Scenario::Fig2a, a),
            Command::Fig2b(a) => (Scenario::Fig2b, a),
            Command::Fuzz(a) => (Scenario::Fuzz, a),
            Command::NvPulse(a) => (Scenario::NvPulse, a),
            Command::Custom(a) => (Scenario::Custom, a),
        }
    }
}

fn run() -> anyhow::Result<i32> {
    let cli = Cli::parse();
    let (scenario, args) = cli.command.split();

    let cfg = match &args.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    let resolved = resolve(scenario, cfg, args.out, args.svg, args.seed)?;
    scenarios::validate_nondefault(&resolved)?;

    match scenario {
        Scenario::Fig1 | Scenario::Custom => {
            println!("{}", scenarios::run_sweep_scenario(&resolved)?);
            Ok(0)
        }
        Scenario::Fig2a => {
            println!("{}", scenarios::run_grid_scenario(&resolved, true)?);
            Ok(0)
        }
        Scenario::Fig2b => {
            println!("{}", scenarios::run_grid_scenario(&resolved, false)?);
            Ok(0)
        }
        Scenario::Fuzz => scenarios::run_fuzz_scenario(&resolved),
        Scenario::NvPulse => {
            println!("{}", scenarios::run_nv_scenario(&resolved)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
