//! Five-level commonsense labels from pairwise preference outcomes.
//!
//! Each video gets a win rate (wins over comparisons, a tie counting half a
//! win). Videos are ordered by win rate, ties broken by video_id, and cut into
//! five contiguous groups whose sizes differ by at most one; the lower groups
//! take the extra members. The lowest group is level 1 (Bad), the highest 5
//! (Perfect).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ValidationError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Winner {
    A,
    B,
    Tie,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairOutcome {
    pub video_a: String,
    pub video_b: String,
    pub winner: Winner,
}

impl PairOutcome {
    pub fn new(a: impl Into<String>, b: impl Into<String>, winner: Winner) -> Self {
        Self {
            video_a: a.into(),
            video_b: b.into(),
            winner,
        }
    }
}

pub fn win_rates(outcomes: &[PairOutcome]) -> Result<BTreeMap<String, f64>, ValidationError> {
    let mut tally: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
    for o in outcomes {
        if o.video_a == o.video_b {
            return Err(ValidationError::DegenerateInput(format!(
                "video {} compared with itself",
                o.video_a
            )));
        }
        let (wa, wb) = match o.winner {
            Winner::A => (1.0, 0.0),
            Winner::B => (0.0, 1.0),
            Winner::Tie => (0.5, 0.5),
        };
        for (id, w) in [(&o.video_a, wa), (&o.video_b, wb)] {
            let e = tally.entry(id).or_default();
            e.0 += w;
            e.1 += 1;
        }
    }
    Ok(tally
        .into_iter()
        .map(|(id, (w, n))| (id.to_string(), w / n as f64))
        .collect())
}

/// Sizes of five contiguous groups over `n` items, lowest group first.
pub fn quintile_sizes(n: usize) -> [usize; 5] {
    let mut sizes = [n / 5; 5];
    for s in sizes.iter_mut().take(n % 5) {
        *s += 1;
    }
    sizes
}

/// Levels 1..=5 from already computed win rates.
pub fn labels_from_win_rates(rates: &BTreeMap<String, f64>) -> BTreeMap<String, u8> {
    let mut order: Vec<(&String, f64)> = rates.iter().map(|(k, &v)| (k, v)).collect();
    // BTreeMap iteration is already in video_id order, so a stable sort keeps it for ties.
    order.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut labels = BTreeMap::new();
    let mut it = order.into_iter();
    for (level, size) in quintile_sizes(rates.len()).into_iter().enumerate() {
        for (id, _) in it.by_ref().take(size) {
            labels.insert(id.clone(), level as u8 + 1);
        }
    }
    labels
}

pub fn derive_commonsense_labels(outcomes: &[PairOutcome]) -> Result<BTreeMap<String, u8>, ValidationError> {
    if outcomes.is_empty() {
        return Err(ValidationError::DegenerateInput("no pair outcomes".into()));
    }
    Ok(labels_from_win_rates(&win_rates(outcomes)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Round robin where the video with the larger index always wins.
    fn dominance(n: usize) -> Vec<PairOutcome> {
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                out.push(PairOutcome::new(format!("v{i:03}"), format!("v{j:03}"), Winner::B));
            }
        }
        out
    }

    #[test]
    fn five_videos_get_each_level() {
        let labels = derive_commonsense_labels(&dominance(5)).unwrap();
        let levels: Vec<u8> = labels.values().copied().collect();
        assert_eq!(levels, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn ten_videos_in_pairs() {
        let labels = derive_commonsense_labels(&dominance(10)).unwrap();
        let levels: Vec<u8> = labels.values().copied().collect();
        assert_eq!(levels, vec![1, 1, 2, 2, 3, 3, 4, 4, 5, 5]);
    }

    #[test]
    fn group_sizes() {
        assert_eq!(quintile_sizes(7), [2, 2, 1, 1, 1]);
        assert_eq!(quintile_sizes(23), [5, 5, 5, 4, 4]);
        assert_eq!(quintile_sizes(3), [1, 1, 1, 0, 0]);
    }

    #[test]
    fn ties_count_half_and_break_by_id() {
        let outcomes = vec![
            PairOutcome::new("b", "a", Winner::Tie),
            PairOutcome::new("c", "a", Winner::A),
        ];
        let rates = win_rates(&outcomes).unwrap();
        assert_eq!(rates["a"], 0.25);
        assert_eq!(rates["b"], 0.5);
        assert_eq!(rates["c"], 1.0);
        let tied = vec![PairOutcome::new("y", "x", Winner::Tie)];
        let labels = derive_commonsense_labels(&tied).unwrap();
        assert_eq!(labels["x"], 1);
        assert_eq!(labels["y"], 2);
    }

    #[test]
    fn self_comparison_rejected() {
        assert!(derive_commonsense_labels(&[PairOutcome::new("a", "a", Winner::A)]).is_err());
        assert!(derive_commonsense_labels(&[]).is_err());
    }
}
