//! `ptfesh` — spectra, sweeps, evolution traces and invariant checks for
//! Feshbach-reduced Hermitian and PT-symmetric Hamiltonians.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod emit;
mod prepare;

/// Process outcome with the exit-code contract:
/// 0 success, 1 failed invariant, 2 solver failure, 3 config error.
#[derive(Debug)]
pub struct AppError {
    pub code: u8,
    pub message: String,
}

impl AppError {
    pub fn config(message: impl Into<String>) -> Self {
        AppError {
            code: 3,
            message: message.into(),
        }
    }

    pub fn solver(message: impl Into<String>) -> Self {
        AppError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn check_failed(message: impl Into<String>) -> Self {
        AppError {
            code: 1,
            message: message.into(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "ptfesh",
    version,
    about = "Feshbach-reduced spectra of Hermitian and PT-symmetric Hamiltonians"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the spectrum by the Feshbach route, the dense oracle, or both.
    Spectrum(CommonArgs),
    /// Sweep a model parameter and report the PT-breaking transition.
    Sweep(CommonArgs),
    /// Propagate an initial state and trace pseudo-norm conservation.
    Evolve(CommonArgs),
    /// Run the invariant check suite and emit a JSON report.
    Check(CommonArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Oscillator basis dimension.
    #[arg(long)]
    dim: Option<usize>,
    /// Coefficient of the even confining power.
    #[arg(long)]
    g: Option<f64>,
    /// Cubic coefficient as RE+IMi (e.g. 0.5 or 0+0.2i).
    #[arg(long)]
    f: Option<String>,
    /// spectrum method: feshbach, direct, or both.
    #[arg(long)]
    method: Option<String>,
    /// Output path (CSV for spectrum/sweep/evolve, JSON for check).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the randomized checks.
    #[arg(long)]
    seed: Option<u64>,
}

impl CommonArgs {
    fn overrides(&self) -> config::Overrides {
        config::Overrides {
            dim: self.dim,
            g: self.g,
            f: self.f.clone(),
            method: self.method.clone(),
            out: self.out.clone(),
            seed: self.seed,
        }
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Spectrum(args) => {
            let cfg = config::resolve("spectrum", args.config.as_deref(), &args.overrides())?;
            commands::spectrum::run(&cfg)
        }
        Command::Sweep(args) => {
            let cfg = config::resolve("sweep", args.config.as_deref(), &args.overrides())?;
            commands::sweep::run(&cfg)
        }
        Command::Evolve(args) => {
            let cfg = config::resolve("evolve", args.config.as_deref(), &args.overrides())?;
            commands::evolve::run(&cfg)
        }
        Command::Check(args) => {
            let cfg = config::resolve("check", args.config.as_deref(), &args.overrides())?;
            commands::check::run(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("ptfesh: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}
