//! Temporal coherence: fraction of object instances without unexcused
//! disappearance or appearance.
//!
//! Every change of an instance's presence flag is a transition. An instance is
//! anomalous when it has at least one transition that none of the legitimacy rules
//! excuses:
//!
//! * **occlusion**: another instance covers enough of the subject's box at the
//!   hidden side of the transition;
//! * **boundary**: the centroid is within the edge margin and moving out of (or into)
//!   the frame through that edge;
//! * **depth**: the area shrinks (or grows) strictly over the last (first) visible
//!   frames and is below a tiny fraction of the frame area at the transition.

use serde::{Deserialize, Serialize};

use super::MetricError;
use crate::bundle::{BBox, InstanceTrack};
use crate::thresholds::TcsRules;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameGeometry {
    pub width: f64,
    pub height: f64,
}

impl FrameGeometry {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width: f64::from(width),
            height: f64::from(height),
        }
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionKind {
    Disappear,
    Appear,
}

/// A presence change. `frame` is the first frame of the new state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub kind: TransitionKind,
    pub frame: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Occlusion,
    Boundary,
    Depth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionVerdict {
    pub transition: Transition,
    /// First rule that excuses the transition, if any.
    pub rule: Option<Rule>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TcsEvaluation {
    pub score: f64,
    pub instances: usize,
    /// Object ids with at least one unexcused transition.
    pub anomalous: Vec<String>,
}

/// All presence changes of an instance, in frame order.
pub fn presence_transitions(instance: &InstanceTrack) -> Vec<Transition> {
    instance
        .present
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] != w[1])
        .map(|(i, w)| Transition {
            kind: if w[0] {
                TransitionKind::Disappear
            } else {
                TransitionKind::Appear
            },
            frame: i + 1,
        })
        .collect()
}

fn box_area(b: &BBox) -> f64 {
    (b[2] - b[0]).max(0.0) * (b[3] - b[1]).max(0.0)
}

/// Fraction of `subject` covered by `cover`.
pub fn coverage(subject: &BBox, cover: &BBox) -> f64 {
    let inter = [
        subject[0].max(cover[0]),
        subject[1].max(cover[1]),
        subject[2].min(cover[2]),
        subject[3].min(cover[3]),
    ];
    let area = box_area(subject);
    if area <= 0.0 {
        return 0.0;
    }
    box_area(&inter) / area
}

/// `hidden_frame` is the frame where the subject is absent, `seen_frame` the
/// adjacent frame where it is visible.
fn occluded(
    instance: &InstanceTrack,
    others: &[InstanceTrack],
    hidden_frame: usize,
    seen_frame: usize,
    rules: &TcsRules,
) -> bool {
    let Some(subject) = instance.bbox[seen_frame] else {
        return false;
    };
    others
        .iter()
        .filter(|o| o.object_id != instance.object_id)
        .filter_map(|o| o.bbox.get(hidden_frame).copied().flatten())
        .any(|b| coverage(&subject, &b) >= rules.cover_fraction)
}

/// `velocity` must point from the inside of the frame towards the edge the
/// centroid is near.
fn through_edge(centroid: [f64; 2], velocity: [f64; 2], geometry: FrameGeometry, rules: &TcsRules) -> bool {
    let margin = rules.boundary_margin_fraction * geometry.width.min(geometry.height);
    let [x, y] = centroid;
    let [vx, vy] = velocity;
    (x <= margin && vx < 0.0)
        || (x >= geometry.width - margin && vx > 0.0)
        || (y <= margin && vy < 0.0)
        || (y >= geometry.height - margin && vy > 0.0)
}

fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

fn legitimate(
    instance: &InstanceTrack,
    all_instances: &[InstanceTrack],
    transition: Transition,
    geometry: FrameGeometry,
    rules: &TcsRules,
) -> Option<Rule> {
    let t = transition.frame;
    let present = &instance.present;
    let area_limit = rules.min_area_fraction * geometry.area();
    match transition.kind {
        TransitionKind::Disappear => {
            let last = t - 1;
            if occluded(instance, all_instances, t, last, rules) {
                return Some(Rule::Occlusion);
            }
            if last >= 1 && present[last - 1] {
                if let (Some(c0), Some(c1)) = (instance.centroid[last - 1], instance.centroid[last]) {
                    if through_edge(c1, [c1[0] - c0[0], c1[1] - c0[1]], geometry, rules) {
                        return Some(Rule::Boundary);
                    }
                }
            }
            let visible: Vec<f64> = (0..=last).filter_map(|f| instance.area[f]).collect();
            let window = &visible[visible.len().saturating_sub(rules.depth_window)..];
            if window.len() >= 2 && strictly_decreasing(window) && window[window.len() - 1] < area_limit {
                return Some(Rule::Depth);
            }
            None
        }
        TransitionKind::Appear => {
            if occluded(instance, all_instances, t - 1, t, rules) {
                return Some(Rule::Occlusion);
            }
            if t + 1 < present.len() && present[t + 1] {
                // Entering: the reversed motion must leave through the edge.
                if let (Some(c0), Some(c1)) = (instance.centroid[t], instance.centroid[t + 1]) {
                    if through_edge(c0, [c0[0] - c1[0], c0[1] - c1[1]], geometry, rules) {
                        return Some(Rule::Boundary);
                    }
                }
            }
            let visible: Vec<f64> = (t..present.len()).filter_map(|f| instance.area[f]).collect();
            let window = &visible[..visible.len().min(rules.depth_window)];
            let mut reversed = window.to_vec();
            reversed.reverse();
            if window.len() >= 2 && strictly_decreasing(&reversed) && window[0] < area_limit {
                return Some(Rule::Depth);
            }
            None
        }
    }
}

/// Checks every transition of `instance` against the legitimacy rules.
pub fn transition_verdicts(
    instance: &InstanceTrack,
    all_instances: &[InstanceTrack],
    geometry: FrameGeometry,
    rules: &TcsRules,
) -> Vec<TransitionVerdict> {
    presence_transitions(instance)
        .into_iter()
        .map(|transition| TransitionVerdict {
            transition,
            rule: legitimate(instance, all_instances, transition, geometry, rules),
        })
        .collect()
}

/// True iff every presence transition of `instance` is excused by at least one rule.
pub fn legitimate_transition(
    instance: &InstanceTrack,
    all_instances: &[InstanceTrack],
    geometry: FrameGeometry,
    rules: &TcsRules,
) -> bool {
    transition_verdicts(instance, all_instances, geometry, rules)
        .iter()
        .all(|v| v.rule.is_some())
}

pub fn evaluate_tcs(
    instances: &[InstanceTrack],
    geometry: FrameGeometry,
    rules: &TcsRules,
) -> Result<TcsEvaluation, MetricError> {
    if instances.is_empty() {
        return Err(MetricError::EmptyEvidence("no object instances".into()));
    }
    let anomalous: Vec<String> = instances
        .iter()
        .filter(|inst| {
            !presence_transitions(inst).is_empty() && !legitimate_transition(inst, instances, geometry, rules)
        })
        .map(|inst| inst.object_id.clone())
        .collect();
    let n = instances.len();
    Ok(TcsEvaluation {
        score: 1.0 - anomalous.len() as f64 / n as f64,
        instances: n,
        anomalous,
    })
}

pub fn compute_tcs(instances: &[InstanceTrack], geometry: FrameGeometry, rules: &TcsRules) -> Result<f64, MetricError> {
    evaluate_tcs(instances, geometry, rules).map(|e| e.score)
}
