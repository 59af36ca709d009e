//! Pairwise preference accuracy: how often the metric ranks two videos of the
//! same prompt the way the human ratings do.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::labels::Winner;
use super::{HumanScoreTable, ValidationError};
use crate::dimension::Dimension;
use crate::metrics::MotionScoreReport;

/// Aggregates closer than this are a tie.
pub const TIE_RESOLUTION: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferencePair {
    pub prompt_id: String,
    pub video_a: String,
    pub video_b: String,
    pub human_winner: Winner,
    pub metric_winner: Winner,
}

impl PreferencePair {
    pub fn decided(&self) -> bool {
        self.human_winner != Winner::Tie && self.metric_winner != Winner::Tie
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseResult {
    pub accuracy: f64,
    pub candidates: usize,
    pub decided: usize,
    pub matches: usize,
    pub pairs: Vec<PreferencePair>,
}

fn winner(a: f64, b: f64) -> Winner {
    let (ra, rb) = ((a / TIE_RESOLUTION).round(), (b / TIE_RESOLUTION).round());
    if ra > rb {
        Winner::A
    } else if rb > ra {
        Winner::B
    } else {
        Winner::Tie
    }
}

/// Accuracy over every within-prompt pair, from precomputed aggregates.
///
/// Pairs tied on either side are kept in the ledger but left out of the
/// denominator.
pub fn pairwise_from_aggregates(
    human: &BTreeMap<String, f64>,
    metric: &BTreeMap<String, f64>,
    grouping: &BTreeMap<String, Vec<String>>,
) -> Result<PairwiseResult, ValidationError> {
    let lookup = |map: &BTreeMap<String, f64>, id: &str| {
        map.get(id)
            .copied()
            .ok_or_else(|| ValidationError::MissingScore(id.to_string()))
    };
    let mut pairs = Vec::new();
    for (prompt_id, videos) in grouping {
        let mut videos = videos.clone();
        videos.sort();
        for (i, a) in videos.iter().enumerate() {
            let (ha, ma) = (lookup(human, a)?, lookup(metric, a)?);
            for b in &videos[i + 1..] {
                let (hb, mb) = (lookup(human, b)?, lookup(metric, b)?);
                pairs.push(PreferencePair {
                    prompt_id: prompt_id.clone(),
                    video_a: a.clone(),
                    video_b: b.clone(),
                    human_winner: winner(ha, hb),
                    metric_winner: winner(ma, mb),
                });
            }
        }
    }
    let decided = pairs.iter().filter(|p| p.decided()).count();
    if decided == 0 {
        return Err(ValidationError::NoDecidedPairs);
    }
    let matches = pairs
        .iter()
        .filter(|p| p.decided() && p.human_winner == p.metric_winner)
        .count();
    Ok(PairwiseResult {
        accuracy: matches as f64 / decided as f64,
        candidates: pairs.len(),
        decided,
        matches,
        pairs,
    })
}

/// Human aggregate (mean of the five dimension means) for every grouped video.
pub fn human_aggregates(
    human: &HumanScoreTable,
    grouping: &BTreeMap<String, Vec<String>>,
) -> Result<BTreeMap<String, f64>, ValidationError> {
    grouping
        .values()
        .flatten()
        .map(|id| {
            human
                .aggregate(id)
                .map(|v| (id.clone(), v))
                .ok_or_else(|| ValidationError::MissingScore(id.clone()))
        })
        .collect()
}

/// Metric aggregate over `dims` for every grouped video; absent scores are skipped.
pub fn metric_aggregates(
    reports: &BTreeMap<String, MotionScoreReport>,
    grouping: &BTreeMap<String, Vec<String>>,
    dims: &[Dimension],
) -> Result<BTreeMap<String, f64>, ValidationError> {
    if dims.is_empty() {
        return Err(ValidationError::EmptySubset);
    }
    grouping
        .values()
        .flatten()
        .map(|id| {
            reports
                .get(id)
                .and_then(|r| r.subset_average(dims))
                .map(|v| (id.clone(), v))
                .ok_or_else(|| ValidationError::MissingScore(id.clone()))
        })
        .collect()
}

pub fn pairwise_accuracy(
    human: &HumanScoreTable,
    reports: &BTreeMap<String, MotionScoreReport>,
    grouping: &BTreeMap<String, Vec<String>>,
) -> Result<PairwiseResult, ValidationError> {
    pairwise_from_aggregates(
        &human_aggregates(human, grouping)?,
        &metric_aggregates(reports, grouping, &Dimension::ALL)?,
        grouping,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub subset: Vec<Dimension>,
    pub accuracy: f64,
    pub decided: usize,
}

/// Pairwise accuracy with the metric aggregate restricted to each subset. The
/// human side always uses all five dimensions.
pub fn ablation_sweep(
    human: &HumanScoreTable,
    reports: &BTreeMap<String, MotionScoreReport>,
    grouping: &BTreeMap<String, Vec<String>>,
    subsets: &[Vec<Dimension>],
) -> Result<Vec<AblationRow>, ValidationError> {
    let human = human_aggregates(human, grouping)?;
    subsets
        .iter()
        .map(|subset| {
            let metric = metric_aggregates(reports, grouping, subset)?;
            let r = pairwise_from_aggregates(&human, &metric, grouping)?;
            Ok(AblationRow {
                subset: subset.clone(),
                accuracy: r.accuracy,
                decided: r.decided,
            })
        })
        .collect()
}

/// Removal rows (full set, then dropping TCS, PAS, OIS, MSS, CAS in turn)
/// followed by addition rows (CAS, CAS+MSS, CAS+MSS+OIS).
pub fn standard_ablation_subsets() -> Vec<Vec<Dimension>> {
    let mut out = vec![Dimension::ALL.to_vec()];
    for drop in Dimension::ALL.iter().rev() {
        out.push(Dimension::ALL.iter().copied().filter(|d| d != drop).collect());
    }
    for k in 1..=3 {
        out.push(Dimension::ALL[..k].to_vec());
    }
    out
}
