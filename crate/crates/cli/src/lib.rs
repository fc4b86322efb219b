//! The `cr` command: Game of 24 and logic runs, theory simulations and
//! event-log summaries, each emitting a JSON (or CSV) report.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod logic;
pub mod output;
pub mod report;
pub mod simulate;
pub mod solve24;

#[derive(Debug, Parser)]
#[command(name = "cr", version, about = "Cumulative reasoning: solve, simulate, summarize")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve Game of 24 puzzles from a CSV file.
    Solve24(solve24::Solve24Args),
    /// Judge hypotheses against premises (symbolic rules or a chat model).
    Logic(logic::LogicArgs),
    /// Closed forms and Monte Carlo estimates of arrival probabilities.
    Simulate(simulate::SimulateArgs),
    /// Summarize event logs written with --events.
    Report(report::ReportArgs),
}

/// Output destination shared by every command.
#[derive(Debug, Clone, clap::Args)]
pub struct OutArgs {
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags or unreadable input; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// Anything else; exit code 1.
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

pub fn usage(msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

pub fn internal(msg: impl std::fmt::Display) -> CliError {
    CliError::Internal(msg.to_string())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve24(a) => solve24::run(&a),
        Command::Logic(a) => logic::run(&a),
        Command::Simulate(a) => simulate::run(&a),
        Command::Report(a) => report::run(&a),
    }
}
