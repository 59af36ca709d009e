//! Command-line driver: calibration, scoring, human-alignment validation,
//! leaderboards and prompt-suite bookkeeping over a directory of feature bundles.

pub mod args;
pub mod commands;
pub mod corpus;
pub mod output;

use std::ffi::OsString;

use clap::Parser;
use thiserror::Error;

pub use args::Cli;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments or unreadable configuration; exit code 2.
    #[error("{0}")]
    Config(String),
    /// The inputs were read but the corpus as a whole could not be processed; exit code 1.
    #[error("{0}")]
    Corpus(String),
    #[error("annotations reference videos missing from the score report: {}", .0.join(", "))]
    Join(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Corpus(_) | CliError::Join(_) => 1,
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    commands::dispatch(cli)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Config(e.to_string()))?;
    run(cli)
}
