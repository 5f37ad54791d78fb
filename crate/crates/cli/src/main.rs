//! `lambda-herald`: heralded-entanglement surfaces, states and error budgets.

mod commands;
mod grid;
mod output;
mod scenario;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lambda_herald::HeraldError;

/// Bad command-line arguments or scenario contents (exit code 2).
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(String);

impl UsageError {
    pub fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_ZERO_PROBABILITY: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "lambda-herald",
    version,
    about = "Heralded entanglement of two remote Lambda atoms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Concurrence surface C(delta21, V12) as CSV.
    Surface(commands::SurfaceArgs),
    /// Heralded state, concurrence and G2 for one polarizer/phase setting.
    State(commands::StateArgs),
    /// Concurrence error, fidelity and count rates for a realistic setup.
    Uncertainty(commands::UncertaintyArgs),
    /// Concurrence versus relative linear-polarizer angle at delta21 = pi/2.
    Malus(commands::MalusArgs),
    /// Write the effective scenario (file plus overrides) as TOML.
    Scenario(commands::ScenarioArgs),
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return EXIT_USAGE;
    }
    match err.downcast_ref::<HeraldError>() {
        Some(HeraldError::ZeroProbabilityHerald { .. }) => EXIT_ZERO_PROBABILITY,
        Some(HeraldError::NumericalFailure(_)) | Some(HeraldError::QuadratureFailure(_)) => {
            EXIT_NUMERICAL
        }
        Some(HeraldError::InvalidInput(_)) => EXIT_USAGE,
        None => EXIT_FAILURE,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Surface(args) => commands::surface(&args),
        Command::State(args) => commands::state(&args),
        Command::Uncertainty(args) => commands::uncertainty(&args),
        Command::Malus(args) => commands::malus(&args),
        Command::Scenario(args) => commands::scenario(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let code = exit_code(&err);
            eprintln!("error: {err:#}");
            if code == EXIT_ZERO_PROBABILITY {
                eprintln!(
                    "the requested two-photon detection has zero probability (G2 = 0): \
                     no heralded state exists for this polarizer/phase combination"
                );
            }
            ExitCode::from(code)
        }
    }
}
