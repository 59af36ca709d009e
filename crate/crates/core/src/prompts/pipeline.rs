//! Generation, verification and plausibility filtering of prompt candidates.
//!
//! Every record moves through `sampled -> generated -> verified ->
//! llm_validated -> accepted`, and may drop to `rejected` from any
//! non-terminal state. A failed verification triggers one regeneration.

use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::library::SubjectCategory;
use super::sampling::MetadataSet;
use super::PromptError;
use crate::bundle::MovementMode;

pub const DEFAULT_ACCEPT_THRESHOLD: f64 = 0.7;
pub const MIN_WORDS: usize = 10;
pub const MAX_WORDS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptState {
    Sampled,
    Generated,
    Verified,
    LlmValidated,
    Accepted,
    Rejected,
}

impl PromptState {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Sampled => "sampled",
            Self::Generated => "generated",
            Self::Verified => "verified",
            Self::LlmValidated => "llm_validated",
            Self::Accepted => "accepted",
            Self::Rejected => "rejected",
        }
    }

    pub fn is_terminal(self) -> bool {
        matches!(self, Self::Accepted | Self::Rejected)
    }

    /// Legal successor states. `generated -> generated` is a regeneration.
    pub fn can_move_to(self, next: PromptState) -> bool {
        use PromptState::*;
        match (self, next) {
            (s, Rejected) => !s.is_terminal(),
            (Sampled, Generated) | (Generated, Generated) | (Generated, Verified) => true,
            (Verified, LlmValidated) | (LlmValidated, Accepted) => true,
            _ => false,
        }
    }
}

impl fmt::Display for PromptState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "cause", rename_all = "snake_case")]
pub enum Rejection {
    GeneratorFailure { message: String },
    VerificationFailed,
    JudgeFailure { message: String },
    LowPlausibility { score: f64, threshold: f64 },
    WordCount { words: usize },
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::GeneratorFailure { message } => write!(f, "generator failure: {message}"),
            Self::VerificationFailed => f.write_str("inconsistent with metadata after regeneration"),
            Self::JudgeFailure { message } => write!(f, "judge failure: {message}"),
            Self::LowPlausibility { score, threshold } => {
                write!(f, "plausibility {score} below {threshold}")
            }
            Self::WordCount { words } => {
                write!(f, "{words} words outside {MIN_WORDS}..={MAX_WORDS}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub state: PromptState,
    pub note: String,
}

/// Where a record came from. Imported records carry only an import entry in
/// their audit trail.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptSource {
    #[default]
    Pipeline,
    Imported,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptRecord {
    pub prompt_id: String,
    pub subject_ref: String,
    pub place_ref: String,
    pub action_ref: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject_category: Option<SubjectCategory>,
    pub movement_mode: MovementMode,
    pub text: String,
    pub word_count: usize,
    pub state: PromptState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plausibility: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rejection: Option<Rejection>,
    /// Manual review verdict, set from the review tool; `None` when unreviewed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub human_review: Option<bool>,
    #[serde(default)]
    pub source: PromptSource,
    #[serde(default)]
    pub audit: Vec<AuditEntry>,
}

pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

impl PromptRecord {
    pub fn sampled(prompt_id: impl Into<String>, set: &MetadataSet) -> Self {
        Self {
            prompt_id: prompt_id.into(),
            subject_ref: set.subject.name.clone(),
            place_ref: set.place.name.clone(),
            action_ref: set.action.name.clone(),
            subject_category: Some(set.subject.category),
            movement_mode: set.action.movement_mode,
            text: String::new(),
            word_count: 0,
            state: PromptState::Sampled,
            plausibility: None,
            rejection: None,
            human_review: None,
            source: PromptSource::Pipeline,
            audit: vec![AuditEntry {
                state: PromptState::Sampled,
                note: String::new(),
            }],
        }
    }

    pub fn advance(&mut self, next: PromptState, note: impl Into<String>) -> Result<(), PromptError> {
        if !self.state.can_move_to(next) {
            return Err(PromptError::IllegalTransition {
                prompt_id: self.prompt_id.clone(),
                from: self.state,
                to: next,
            });
        }
        self.state = next;
        self.audit.push(AuditEntry {
            state: next,
            note: note.into(),
        });
        Ok(())
    }

    fn reject(&mut self, cause: Rejection) {
        let note = cause.to_string();
        self.rejection = Some(cause);
        self.advance(PromptState::Rejected, note)
            .expect("rejection from a non-terminal state");
    }

    fn set_text(&mut self, text: String) {
        self.word_count = word_count(&text);
        self.text = text;
    }

    /// Accepted by the pipeline and not turned down in manual review.
    pub fn is_final_accepted(&self) -> bool {
        self.state == PromptState::Accepted && self.human_review != Some(false)
    }

    /// Whether the audit trail starts at `sampled`, follows legal transitions
    /// and ends in the current state.
    pub fn audit_is_consistent(&self) -> bool {
        if self.source == PromptSource::Imported {
            return self.audit.len() == 1 && self.audit[0].state == self.state;
        }
        let Some(first) = self.audit.first() else {
            return false;
        };
        first.state == PromptState::Sampled
            && self.audit.windows(2).all(|w| w[0].state.can_move_to(w[1].state))
            && self.audit.last().map(|e| e.state) == Some(self.state)
    }
}

/// Failure reported by an external text service.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceError(pub String);

impl fmt::Display for ServiceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub trait PromptGenerator {
    /// Candidate prompt text. `attempt` is 0 for the first try, 1 for the regeneration.
    fn generate(&self, set: &MetadataSet, attempt: usize) -> Result<String, ServiceError>;
    /// Whether `text` is consistent with the metadata set.
    fn verify(&self, text: &str, set: &MetadataSet) -> Result<bool, ServiceError>;
}

pub trait PlausibilityJudge {
    /// Plausibility in `[0,1]`.
    fn judge(&self, text: &str) -> Result<f64, ServiceError>;
}

/// Deterministic generator filling `{subject}`, `{place}` and `{action}` in a
/// template. Verification checks that all three names occur in the text.
#[derive(Debug, Clone)]
pub struct TemplateGenerator {
    pub template: String,
}

impl TemplateGenerator {
    pub fn new(template: impl Into<String>) -> Self {
        Self {
            template: template.into(),
        }
    }
}

impl Default for TemplateGenerator {
    fn default() -> Self {
        Self::new(
            "In a steady continuous shot, {subject} {action} across {place}, \
             the motion clearly visible from start to finish under soft natural light.",
        )
    }
}

impl PromptGenerator for TemplateGenerator {
    fn generate(&self, set: &MetadataSet, _attempt: usize) -> Result<String, ServiceError> {
        Ok(self
            .template
            .replace("{subject}", &set.subject.name)
            .replace("{place}", &set.place.name)
            .replace("{action}", &set.action.name))
    }

    fn verify(&self, text: &str, set: &MetadataSet) -> Result<bool, ServiceError> {
        let lower = text.to_lowercase();
        Ok([&set.subject.name, &set.place.name, &set.action.name]
            .iter()
            .all(|n| lower.contains(&n.to_lowercase())))
    }
}

/// Judge returning the same score for every text.
#[derive(Debug, Clone, Copy)]
pub struct FixedJudge(pub f64);

impl PlausibilityJudge for FixedJudge {
    fn judge(&self, _text: &str) -> Result<f64, ServiceError> {
        Ok(self.0)
    }
}

fn process<G: PromptGenerator + ?Sized, J: PlausibilityJudge + ?Sized>(
    record: &mut PromptRecord,
    set: &MetadataSet,
    generator: &G,
    judge: &J,
    accept_threshold: f64,
) -> Result<(), PromptError> {
    let mut verified = false;
    for attempt in 0..2 {
        let text = match generator.generate(set, attempt) {
            Ok(t) => t,
            Err(e) => {
                record.reject(Rejection::GeneratorFailure { message: e.0 });
                return Ok(());
            }
        };
        record.set_text(text);
        let note = if attempt == 0 { "generated" } else { "regenerated" };
        record.advance(PromptState::Generated, note)?;
        match generator.verify(&record.text, set) {
            Ok(true) => {
                verified = true;
                break;
            }
            Ok(false) => {}
            Err(e) => {
                record.reject(Rejection::GeneratorFailure { message: e.0 });
                return Ok(());
            }
        }
    }
    if !verified {
        record.reject(Rejection::VerificationFailed);
        return Ok(());
    }
    record.advance(PromptState::Verified, "consistent with metadata")?;

    let score = match judge.judge(&record.text) {
        Ok(s) if (0.0..=1.0).contains(&s) => s,
        Ok(s) => {
            record.reject(Rejection::JudgeFailure {
                message: format!("score {s} outside [0,1]"),
            });
            return Ok(());
        }
        Err(e) => {
            record.reject(Rejection::JudgeFailure { message: e.0 });
            return Ok(());
        }
    };
    record.plausibility = Some(score);
    record.advance(PromptState::LlmValidated, format!("plausibility {score}"))?;

    if score < accept_threshold {
        record.reject(Rejection::LowPlausibility {
            score,
            threshold: accept_threshold,
        });
    } else if !(MIN_WORDS..=MAX_WORDS).contains(&record.word_count) {
        record.reject(Rejection::WordCount {
            words: record.word_count,
        });
    } else {
        record.advance(PromptState::Accepted, "")?;
    }
    Ok(())
}

/// Runs every set through the pipeline. Service failures reject the affected
/// record and never stop the batch. Prompt ids are `{prefix}{index:05}`.
pub fn run_pipeline<G: PromptGenerator + ?Sized, J: PlausibilityJudge + ?Sized>(
    sets: &[MetadataSet],
    generator: &G,
    judge: &J,
    accept_threshold: f64,
    id_prefix: &str,
) -> Vec<PromptRecord> {
    sets.iter()
        .enumerate()
        .map(|(i, set)| {
            let mut record = PromptRecord::sampled(format!("{id_prefix}{i:05}"), set);
            process(&mut record, set, generator, judge, accept_threshold)
                .expect("pipeline only takes legal transitions");
            record
        })
        .collect()
}

/// Reads one JSON record per line, skipping blank lines.
pub fn read_records<R: BufRead>(reader: R) -> Result<Vec<PromptRecord>, PromptError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| PromptError::Format {
            line: i + 1,
            reason: e.to_string(),
        })?);
    }
    Ok(out)
}

pub fn write_records<W: Write>(mut writer: W, records: &[PromptRecord]) -> Result<(), PromptError> {
    for r in records {
        serde_json::to_writer(&mut writer, r)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
struct ReleasedRow {
    id: String,
    text: String,
    mode: String,
    subject: String,
    place: String,
    action: String,
}

/// Imports a released suite from CSV with header `id,text,mode,subject,place,action`.
/// Records outside the word-count bound are kept as rejected.
pub fn import_released_suite<R: std::io::Read>(reader: R) -> Result<Vec<PromptRecord>, PromptError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<ReleasedRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| PromptError::Format {
            line,
            reason: e.to_string(),
        })?;
        let movement_mode: MovementMode = row
            .mode
            .parse()
            .map_err(|reason| PromptError::Format { line, reason })?;
        let words = word_count(&row.text);
        let (state, rejection) = if (MIN_WORDS..=MAX_WORDS).contains(&words) {
            (PromptState::Accepted, None)
        } else {
            (PromptState::Rejected, Some(Rejection::WordCount { words }))
        };
        out.push(PromptRecord {
            prompt_id: row.id,
            subject_ref: row.subject,
            place_ref: row.place,
            action_ref: row.action,
            subject_category: None,
            movement_mode,
            text: row.text,
            word_count: words,
            state,
            plausibility: None,
            rejection,
            human_review: None,
            source: PromptSource::Imported,
            audit: vec![AuditEntry {
                state,
                note: "imported".into(),
            }],
        });
    }
    Ok(out)
}

/// Sets the manual-review verdict on the record with `prompt_id`.
pub fn apply_review(records: &mut [PromptRecord], prompt_id: &str, accepted: bool) -> bool {
    match records.iter_mut().find(|r| r.prompt_id == prompt_id) {
        Some(r) => {
            r.human_review = Some(accepted);
            true
        }
        None => false,
    }
}
