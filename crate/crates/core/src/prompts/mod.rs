//! Prompt-suite bookkeeping: metadata library, sampling of metadata sets, the
//! generate/verify/judge pipeline and suite statistics.

pub mod library;
pub mod pipeline;
pub mod sampling;
pub mod stats;

use thiserror::Error;

pub use library::{Action, EntityCount, MetadataLibrary, Place, Subject, SubjectCategory};
pub use pipeline::{
    apply_review, import_released_suite, read_records, run_pipeline, write_records, AuditEntry, FixedJudge,
    PlausibilityJudge, PromptGenerator, PromptRecord, PromptSource, PromptState, Rejection, ServiceError,
    TemplateGenerator, DEFAULT_ACCEPT_THRESHOLD,
};
pub use sampling::{admissible_count, sample_metadata_sets, MetadataSet};
pub use stats::{suite_statistics, SuiteStatistics};

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("invalid metadata library: {0}")]
    Library(String),
    #[error("requested {requested} metadata sets but only {available} admissible combinations exist")]
    ExhaustedSpace { requested: usize, available: usize },
    #[error("prompt {prompt_id}: illegal transition {from} -> {to}")]
    IllegalTransition {
        prompt_id: String,
        from: PromptState,
        to: PromptState,
    },
    #[error("line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error("no prompt records")]
    EmptySuite,
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
