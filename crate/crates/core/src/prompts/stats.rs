//! Composition statistics of a prompt suite.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::pipeline::{PromptRecord, MAX_WORDS, MIN_WORDS};
use super::PromptError;
use crate::bundle::MovementMode;

pub const BUCKET_WIDTH: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramBucket {
    /// Inclusive lower bound in words.
    pub lo: usize,
    /// Exclusive upper bound, except the last bucket which also holds `MAX_WORDS`.
    pub hi: usize,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteStatistics {
    pub total: usize,
    pub by_mode: BTreeMap<String, usize>,
    pub by_category: BTreeMap<String, usize>,
    pub word_histogram: Vec<HistogramBucket>,
    /// Records whose word count falls outside the histogram range.
    pub out_of_range: usize,
    pub distinct_subjects: usize,
    pub distinct_places: usize,
    pub distinct_actions: usize,
}

pub fn suite_statistics(records: &[PromptRecord]) -> Result<SuiteStatistics, PromptError> {
    if records.is_empty() {
        return Err(PromptError::EmptySuite);
    }
    let mut by_mode: BTreeMap<String, usize> = MovementMode::ALL.iter().map(|m| (m.as_str().to_string(), 0)).collect();
    let mut by_category = BTreeMap::new();
    let mut word_histogram: Vec<HistogramBucket> = (MIN_WORDS..MAX_WORDS)
        .step_by(BUCKET_WIDTH)
        .map(|lo| HistogramBucket {
            lo,
            hi: lo + BUCKET_WIDTH,
            count: 0,
        })
        .collect();
    let mut out_of_range = 0;
    let (mut subjects, mut places, mut actions) = (BTreeSet::new(), BTreeSet::new(), BTreeSet::new());
    for r in records {
        *by_mode.entry(r.movement_mode.as_str().to_string()).or_default() += 1;
        let category = r.subject_category.map_or("unknown", |c| c.as_str());
        *by_category.entry(category.to_string()).or_default() += 1;
        if (MIN_WORDS..=MAX_WORDS).contains(&r.word_count) {
            let idx = ((r.word_count - MIN_WORDS) / BUCKET_WIDTH).min(word_histogram.len() - 1);
            word_histogram[idx].count += 1;
        } else {
            out_of_range += 1;
        }
        subjects.insert(r.subject_ref.as_str());
        places.insert(r.place_ref.as_str());
        actions.insert(r.action_ref.as_str());
    }
    Ok(SuiteStatistics {
        total: records.len(),
        by_mode,
        by_category,
        word_histogram,
        out_of_range,
        distinct_subjects: subjects.len(),
        distinct_places: places.len(),
        distinct_actions: actions.len(),
    })
}
