//! `qhe`: scenario runner for the quantum-heat-engine simulation library.
//!
//! ```text
//! qhe <scenario> --config <path> [--out <prefix>] [--fixed-step <dt>] [--seed <n>]
//! qhe verify [--seed <n>] [--tol <t>]
//! ```
//!
//! Exit codes: 0 success, 1 failed verification, 2 configuration error,
//! 3 numerical error. `QHE_THREADS` caps sweep parallelism.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod config;
mod csvout;
mod manifest;
mod scenarios;
mod verify;

use config::{CliError, ScenarioKind};

#[derive(Parser)]
#[command(name = "qhe", version, about = "Quantum heat engine simulation scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON scenario configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output path prefix (overrides the config's `output`).
    #[arg(long)]
    out: Option<String>,
    /// Use the fixed-step RK4 integrator with this step (reproducible mode).
    #[arg(long = "fixed-step")]
    fixed_step: Option<f64>,
    /// Seed override for randomized checks recorded in the manifest.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Equal-frequency Rabi exchange of two thermal modes.
    Rabi(RunArgs),
    /// Three oscillators sharing one incoherent energy source.
    ThreeMode(RunArgs),
    /// One photonic engine cycle of fixed duration.
    PhotonicCycle(RunArgs),
    /// Locate the work-maximizing cycle duration at parametric resonance.
    PhotonicOptimize(RunArgs),
    /// Sweep the cold-mode frequency against the Carnot bound.
    CarnotSweep(RunArgs),
    /// One two-qubit (atomic) engine cycle.
    TlsCycle(RunArgs),
    /// Counter-rotating working substance over a closed cycle.
    CounterRotating(RunArgs),
    /// Run every invariant suite.
    Verify {
        #[arg(long)]
        seed: Option<u64>,
        /// Integrator tolerance handed to the suites (negative control:
        /// out-of-range values must make them fail).
        #[arg(long)]
        tol: Option<f64>,
    },
}

fn main() -> ExitCode {
    configure_thread_pool();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Rabi(args) => scenarios::run(ScenarioKind::Rabi, args_into(args)),
        Command::ThreeMode(args) => scenarios::run(ScenarioKind::ThreeMode, args_into(args)),
        Command::PhotonicCycle(args) => scenarios::run(ScenarioKind::PhotonicCycle, args_into(args)),
        Command::PhotonicOptimize(args) => {
            scenarios::run(ScenarioKind::PhotonicOptimize, args_into(args))
        }
        Command::CarnotSweep(args) => scenarios::run(ScenarioKind::CarnotSweep, args_into(args)),
        Command::TlsCycle(args) => scenarios::run(ScenarioKind::TlsCycle, args_into(args)),
        Command::CounterRotating(args) => {
            scenarios::run(ScenarioKind::CounterRotating, args_into(args))
        }
        Command::Verify { seed, tol } => verify::run(seed, tol),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(errors)) => {
            for e in &errors {
                eprintln!("config error: {e}");
            }
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical error: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::VerifyFailed(n)) => {
            eprintln!("verify: {n} suite(s) failed");
            ExitCode::from(1)
        }
    }
}

fn args_into(args: RunArgs) -> scenarios::RunRequest {
    scenarios::RunRequest {
        config_path: args.config,
        out: args.out,
        fixed_step: args.fixed_step,
        seed: args.seed,
    }
}

fn configure_thread_pool() {
    if let Ok(v) = std::env::var("QHE_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}
