mod args;
mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Outcome;

/// Exit status for an error: 3 for numerical failure, 2 for everything else.
fn error_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<rivalry_core::Error>() {
        Some(rivalry_core::Error::NumericalBlowup { .. }) => Outcome::NumericalFailure.code(),
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => commands::cmd_simulate(a),
        Command::Sweep(a) => commands::cmd_sweep(a, cli.jobs),
        Command::Levelt(a) => commands::cmd_levelt(a, cli.jobs),
        Command::Classify(a) => commands::cmd_classify(a),
    };
    match result {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(error_code(&err))
        }
    }
}
