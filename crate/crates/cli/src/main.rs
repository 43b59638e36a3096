//! Command-line front end for Monte Carlo runs of the online estimators.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 for failures
//! while running or writing results.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use olspice::harness::{self, sidecar_path};
use olspice::{EstimatorSpec, RunConfig, RunOptions, ScenarioSpec, Snapshots, SnrSweep};

#[derive(Parser, Debug)]
#[command(
    name = "olspice",
    version,
    about = "Online sparse estimation experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a Monte Carlo experiment and write CSV plus a JSON sidecar.
    Run(RunArgs),
    /// Re-run the experiment recorded in a JSON sidecar.
    Replay {
        #[arg(long)]
        sidecar: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    /// Scenario file (`.toml`, or `.json`).
    #[arg(long)]
    scenario: PathBuf,
    /// Comma-separated list, e.g. `olspice:L=1,ollasso:feasible,olrls:oracle`.
    #[arg(long)]
    estimators: String,
    #[arg(long)]
    out: PathBuf,
    /// Overrides the scenario's trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Overrides the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Report a zero estimate for the first N samples.
    #[arg(long, value_name = "N")]
    zero_hold: Option<usize>,
    #[arg(long, default_value = "log", value_parser = ["log", "all"])]
    snapshots: String,
    /// SNR sweep `from:to:step` in dB at a fixed sample count.
    #[arg(long, value_name = "A:B:STEP")]
    snr_sweep: Option<String>,
    #[arg(long, requires = "snr_sweep", default_value_t = 250)]
    fixed_n: usize,
}

enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<olspice::Error> for Failure {
    fn from(e: olspice::Error) -> Self {
        if e.is_config() {
            Failure::Config(e.into())
        } else {
            Failure::Runtime(e.into())
        }
    }
}

fn build_config(args: &RunArgs) -> Result<RunConfig, Failure> {
    let mut scenario = ScenarioSpec::load(&args.scenario)
        .with_context(|| format!("loading scenario {}", args.scenario.display()))
        .map_err(Failure::Config)?;
    if let Some(trials) = args.trials {
        scenario.trials = trials;
    }
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    let sweep = match &args.snr_sweep {
        Some(text) => Some(SnrSweep {
            fixed_n: args.fixed_n,
            ..text.parse::<SnrSweep>()?
        }),
        None => None,
    };
    let config = RunConfig {
        scenario,
        estimators: EstimatorSpec::parse_list(&args.estimators)?,
        options: RunOptions {
            zero_hold: args.zero_hold,
            snapshots: args.snapshots.parse::<Snapshots>()?,
        },
        sweep,
    };
    config.validate()?;
    Ok(config)
}

fn execute(config: &RunConfig, out: &Path) -> Result<(), Failure> {
    let summary = harness::run_config(config)?;
    harness::emit(&summary, out)?;
    eprintln!(
        "wrote {} rows to {} ({} trials, {:.2} s); config in {}",
        summary.rows.len(),
        out.display(),
        config.scenario.trials,
        summary.runtime_secs,
        sidecar_path(out).display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => build_config(args).and_then(|config| execute(&config, &args.out)),
        Command::Replay { sidecar, out } => RunConfig::from_sidecar(sidecar)
            .with_context(|| format!("reading sidecar {}", sidecar.display()))
            .map_err(Failure::Config)
            .and_then(|config| execute(&config, out)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
