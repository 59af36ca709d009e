//! Human-alignment statistics: annotation aggregation, rank correlation,
//! pairwise preference accuracy, ablations and commonsense labeling.

pub mod annotations;
pub mod labels;
pub mod pairwise;
pub mod spearman;
pub mod tables;

use thiserror::Error;

pub use annotations::{aggregate_annotations, AnnotationRecord, HumanScore, HumanScoreTable};
pub use labels::{derive_commonsense_labels, PairOutcome, Winner};
pub use pairwise::{
    ablation_sweep, pairwise_accuracy, pairwise_from_aggregates, standard_ablation_subsets, AblationRow,
    PairwiseResult, PreferencePair,
};
pub use spearman::{correlation_matrix, fractional_ranks, spearman_rho};
pub use tables::{improvement_report, CorrelationRow, ImprovementReport};

use crate::dimension::Dimension;

#[derive(Debug, Error, PartialEq)]
pub enum ValidationError {
    #[error("video {video_id} annotator {annotator_id} rated {dimension} more than once")]
    DuplicateRating {
        video_id: String,
        dimension: Dimension,
        annotator_id: String,
    },
    #[error("package {package_id} mixes dimensions {first} and {second}")]
    MixedDimensionPackage {
        package_id: String,
        first: Dimension,
        second: Dimension,
    },
    #[error("rating {rating} outside the 1..=5 Likert scale")]
    InvalidRating { rating: i64 },
    #[error("annotation line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 observations, got {0}")]
    TooFewSamples(usize),
    #[error("missing score for video {0}")]
    MissingScore(String),
    #[error("no decided pairs (every pair tied)")]
    NoDecidedPairs,
    #[error("empty dimension subset")]
    EmptySubset,
    #[error("no baselines to compare against")]
    NoBaselines,
}
