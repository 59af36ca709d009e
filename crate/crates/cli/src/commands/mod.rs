mod annotations;
mod calibrate;
mod leaderboard;
mod prompts;
mod score;
mod validate;

use motionbench_core::dimension::{parse_subset, Dimension};

use crate::args::{AnnotationsCommand, Cli, Command};
use crate::output::Outputs;
use crate::CliError;

pub use leaderboard::{leaderboard, LeaderboardRow};
pub use validate::{DimensionCorrelation, ValidationReport};

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    let out = Outputs::new(&cli.out, cli.dry_run);
    match cli.command {
        Command::Calibrate(a) => calibrate::run(&a, &out),
        Command::Score(a) => score::run(&a, &out),
        Command::Validate(a) => validate::run(&a, &out, false),
        Command::Ablate(a) => validate::run(&a, &out, true),
        Command::Leaderboard(a) => leaderboard::run(&a, &out),
        Command::Prompts(c) => prompts::run(c, &out),
        Command::Annotations(AnnotationsCommand::Import { annotations }) => annotations::run(&annotations, &out),
    }
}

fn subset(text: &str) -> Result<Vec<Dimension>, CliError> {
    let dims = parse_subset(text).map_err(|e| CliError::Config(e.to_string()))?;
    if dims.is_empty() {
        return Err(CliError::Config(format!("empty dimension subset {text:?}")));
    }
    Ok(dims)
}
