use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "motionbench",
    version,
    about = "Motion-quality scoring and human-alignment validation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Directory that receives the command's output files.
    #[arg(long, global = true, env = "MOTIONBENCH_OUT_DIR", default_value = "motionbench-out")]
    pub out: PathBuf,

    /// Check the inputs and report what would be written, without writing.
    #[arg(long, global = true)]
    pub dry_run: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derive thresholds from a reference corpus of natural videos.
    Calibrate(CalibrateArgs),
    /// Score every bundle of a corpus.
    Score(ScoreArgs),
    /// Correlate scores with human ratings: Spearman, pairwise accuracy, ablation, matrices.
    Validate(ValidateArgs),
    /// Pairwise accuracy for metric subsets only.
    Ablate(ValidateArgs),
    /// Per-model mean scores.
    Leaderboard(LeaderboardArgs),
    /// Prompt-suite sampling, pipeline, statistics and import.
    #[command(subcommand)]
    Prompts(PromptsCommand),
    /// Annotation file handling.
    #[command(subcommand)]
    Annotations(AnnotationsCommand),
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Directory of reference bundles.
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long, default_value_t = 0.99)]
    pub quantile: f64,
    /// Partial threshold document merged over the calibrated values.
    #[arg(long)]
    pub overrides: Option<PathBuf>,
    /// Minimum samples per scenario and metric before a dedicated threshold is kept.
    #[arg(long, default_value_t = 30)]
    pub min_samples: usize,
    /// Lower bound for every threshold.
    #[arg(long, default_value_t = 1e-3)]
    pub floor: f64,
    /// Extra skeleton schemas (JSON list).
    #[arg(long)]
    pub skeletons: Option<PathBuf>,
    /// Corpus name recorded in the provenance block; defaults to the directory name.
    #[arg(long)]
    pub corpus_id: Option<String>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Directory of bundles, optionally with an index.csv.
    #[arg(long)]
    pub bundles: PathBuf,
    /// Threshold document written by `calibrate`.
    #[arg(long)]
    pub thresholds: PathBuf,
    #[arg(long)]
    pub skeletons: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Score report written by `score`.
    #[arg(long)]
    pub scores: PathBuf,
    /// Annotation file, or a directory of *.csv annotation files.
    #[arg(long)]
    pub annotations: PathBuf,
    /// Metric subset for the ablation, e.g. `CAS,MSS`. Repeatable; defaults to the
    /// removal and addition series.
    #[arg(long = "subset")]
    pub subsets: Vec<String>,
}

#[derive(Debug, Args)]
pub struct LeaderboardArgs {
    #[arg(long)]
    pub scores: PathBuf,
    /// Restrict the average to these dimensions, e.g. `CAS,MSS`.
    #[arg(long)]
    pub subset: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum PromptsCommand {
    /// Draw metadata sets from a library.
    Sample {
        #[arg(long)]
        library: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run sampled sets through generation, verification and plausibility filtering
    /// with the template generator and a fixed judge.
    Run {
        /// metadata_sets.jsonl written by `prompts sample`.
        #[arg(long)]
        sets: PathBuf,
        /// Template with {subject}, {place} and {action} placeholders.
        #[arg(long)]
        template: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        judge_score: f64,
        #[arg(long, default_value_t = motionbench_core::prompts::DEFAULT_ACCEPT_THRESHOLD)]
        accept_threshold: f64,
        #[arg(long, default_value = "prompt-")]
        id_prefix: String,
    },
    /// Composition statistics of a prompt file.
    Stats {
        #[arg(long)]
        prompts: PathBuf,
        /// Include records that were not finally accepted.
        #[arg(long)]
        all: bool,
    },
    /// Import a released suite (CSV) or apply manual-review verdicts to a prompt file.
    Import {
        /// CSV with header id,text,mode,subject,place,action.
        #[arg(long, conflicts_with_all = ["prompts", "reviews"])]
        suite: Option<PathBuf>,
        #[arg(long, requires = "reviews")]
        prompts: Option<PathBuf>,
        /// CSV with header prompt_id,accepted.
        #[arg(long, requires = "prompts")]
        reviews: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum AnnotationsCommand {
    /// Check annotation lines and write per-video mean ratings.
    Import {
        #[arg(long)]
        annotations: PathBuf,
    },
}
