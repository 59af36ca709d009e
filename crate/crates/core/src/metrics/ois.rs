//! Object integrity: per-frame length and angle deviations of skeleton components.
//!
//! Every length component and every angle component of the schema is a separate
//! cell column. A cell is observed at transition `t` when all involved keypoints
//! are visible in frames `t-1` and `t`; unobserved cells are dropped from both the
//! numerator and the denominator.

use std::f64::consts::{PI, TAU};

use super::MetricError;
use crate::bundle::KeypointTrack;
use crate::skeleton::{Component, SkeletonSchema};
use crate::thresholds::ThresholdSet;

/// Deviation of every component at every transition.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationTable {
    pub components: Vec<Component>,
    /// `cells[c][t - 1]` is the deviation of component `c` between frames `t-1`
    /// and `t`; `None` marks an unobserved cell.
    pub cells: Vec<Vec<Option<f64>>>,
}

impl DeviationTable {
    pub fn transitions(&self) -> usize {
        self.cells.first().map_or(0, Vec::len)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OisEvaluation {
    pub score: f64,
    pub observed: usize,
    pub intact: usize,
    /// `(component label, frame)` for every cell over its tolerance.
    pub violations: Vec<(String, usize)>,
}

fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Signed angle at `vertex` from the ray towards `a` to the ray towards `b`, in `(-π, π]`.
fn signed_angle(a: [f64; 2], vertex: [f64; 2], b: [f64; 2]) -> Option<f64> {
    let u = [a[0] - vertex[0], a[1] - vertex[1]];
    let v = [b[0] - vertex[0], b[1] - vertex[1]];
    if (u[0] == 0.0 && u[1] == 0.0) || (v[0] == 0.0 && v[1] == 0.0) {
        return None;
    }
    let cross = u[0] * v[1] - u[1] * v[0];
    let dot = u[0] * v[0] + u[1] * v[1];
    Some(cross.atan2(dot))
}

/// Absolute angular difference wrapped onto `[0, π]`.
pub fn wrapped_angle_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % TAU;
    if d > PI {
        TAU - d
    } else {
        d
    }
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}

/// Reference length for one length component: the schema's value when present,
/// otherwise the median of the lengths observed on this track.
fn reference_length(track: &KeypointTrack, schema: &SkeletonSchema, index: usize, pair: [usize; 2]) -> Option<f64> {
    if let Some(refs) = &schema.reference_lengths {
        return Some(refs[index]);
    }
    let mut observed: Vec<f64> = track
        .positions
        .iter()
        .zip(&track.visibility)
        .filter(|(_, vis)| vis[pair[0]] && vis[pair[1]])
        .map(|(pos, _)| distance(pos[pair[0]], pos[pair[1]]))
        .collect();
    median(&mut observed).filter(|&m| m > 0.0)
}

/// Per-frame, per-component deviation table for one keypoint track.
pub fn anatomical_deviations(track: &KeypointTrack, schema: &SkeletonSchema) -> Result<DeviationTable, MetricError> {
    let n = track.keypoint_count();
    if let Some(max) = schema
        .components()
        .iter()
        .flat_map(|c| match c {
            Component::Length(p) => p.to_vec(),
            Component::Angle(t) => t.to_vec(),
        })
        .max()
    {
        if max >= n {
            return Err(MetricError::SchemaMismatch(format!(
                "schema {} references keypoint {max} but track {} has {n} keypoints",
                schema.schema_id, track.subject_id
            )));
        }
    }

    let frames = track.frame_count();
    let visible = |t: usize, idx: &[usize]| idx.iter().all(|&i| track.visibility[t][i]);
    let mut components = Vec::new();
    let mut cells = Vec::new();

    for (ci, &pair) in schema.length_components.iter().enumerate() {
        let reference = reference_length(track, schema, ci, pair);
        let column = (1..frames)
            .map(|t| {
                let reference = reference?;
                if !(visible(t - 1, &pair) && visible(t, &pair)) {
                    return None;
                }
                let prev = distance(track.positions[t - 1][pair[0]], track.positions[t - 1][pair[1]]);
                let cur = distance(track.positions[t][pair[0]], track.positions[t][pair[1]]);
                Some((cur - prev).abs() / reference)
            })
            .collect();
        components.push(Component::Length(pair));
        cells.push(column);
    }

    for &triple in &schema.angle_components {
        let angle_at = |t: usize| {
            let p = &track.positions[t];
            signed_angle(p[triple[0]], p[triple[1]], p[triple[2]])
        };
        let column = (1..frames)
            .map(|t| {
                if !(visible(t - 1, &triple) && visible(t, &triple)) {
                    return None;
                }
                Some(wrapped_angle_difference(angle_at(t)?, angle_at(t - 1)?))
            })
            .collect();
        components.push(Component::Angle(triple));
        cells.push(column);
    }

    Ok(DeviationTable { components, cells })
}

/// Counts intact cells of a deviation table against the tolerances.
pub fn evaluate_table(table: &DeviationTable, schema_id: &str, thresholds: &ThresholdSet) -> OisEvaluation {
    let mut observed = 0;
    let mut intact = 0;
    let mut violations = Vec::new();
    for (component, column) in table.components.iter().zip(&table.cells) {
        let tau = thresholds.ois.for_component(schema_id, component);
        for (i, cell) in column.iter().enumerate() {
            if let Some(dev) = cell {
                observed += 1;
                if *dev <= tau {
                    intact += 1;
                } else {
                    violations.push((component.to_string(), i + 1));
                }
            }
        }
    }
    let score = if observed == 0 {
        f64::NAN
    } else {
        intact as f64 / observed as f64
    };
    OisEvaluation {
        score,
        observed,
        intact,
        violations,
    }
}

pub fn evaluate_ois(
    track: &KeypointTrack,
    schema: &SkeletonSchema,
    thresholds: &ThresholdSet,
) -> Result<OisEvaluation, MetricError> {
    let table = anatomical_deviations(track, schema)?;
    let eval = evaluate_table(&table, &schema.schema_id, thresholds);
    if eval.observed == 0 {
        return Err(MetricError::EmptyEvidence(format!(
            "no component of {} observed in two consecutive frames",
            track.subject_id
        )));
    }
    Ok(eval)
}

pub fn compute_ois(
    track: &KeypointTrack,
    schema: &SkeletonSchema,
    thresholds: &ThresholdSet,
) -> Result<f64, MetricError> {
    evaluate_ois(track, schema, thresholds).map(|e| e.score)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn schema(lengths: Vec<[usize; 2]>, angles: Vec<[usize; 3]>, refs: Option<Vec<f64>>) -> SkeletonSchema {
        SkeletonSchema {
            schema_id: "test".into(),
            keypoint_names: (0..3).map(|i| format!("k{i}")).collect(),
            length_components: lengths,
            angle_components: angles,
            reference_lengths: refs,
        }
    }

    fn track(frames: Vec<Vec<[f64; 2]>>) -> KeypointTrack {
        let visibility = frames.iter().map(|f| vec![true; f.len()]).collect();
        KeypointTrack {
            subject_id: "s".into(),
            schema_id: "test".into(),
            positions: frames,
            visibility,
        }
    }

    #[test]
    fn stretching_segment_deviation() {
        let s = schema(vec![[0, 1]], vec![], Some(vec![100.0]));
        let t = track(vec![
            vec![[0.0, 0.0], [100.0, 0.0], [0.0, 0.0]],
            vec![[0.0, 0.0], [130.0, 0.0], [0.0, 0.0]],
        ]);
        let table = anatomical_deviations(&t, &s).unwrap();
        assert!((table.cells[0][0].unwrap() - 0.30).abs() < 1e-15);
    }

    #[test]
    fn right_angle_to_straight() {
        let s = schema(vec![], vec![[0, 1, 2]], None);
        let t = track(vec![
            vec![[10.0, 0.0], [0.0, 0.0], [0.0, 10.0]],
            vec![[10.0, 0.0], [0.0, 0.0], [-10.0, 0.0]],
        ]);
        let table = anatomical_deviations(&t, &s).unwrap();
        assert!((table.cells[0][0].unwrap() - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn wrap_keeps_differences_within_pi() {
        assert!((wrapped_angle_difference(PI - 0.1, -PI + 0.1) - 0.2).abs() < 1e-12);
        assert_eq!(wrapped_angle_difference(0.3, 0.3), 0.0);
    }

    #[test]
    fn translation_gives_zero_deviation() {
        let s = schema(vec![[0, 1], [1, 2]], vec![[0, 1, 2]], None);
        let base = [[1.0, 2.0], [4.0, 6.0], [9.0, 1.0]];
        let frames = (0..4)
            .map(|k| {
                base.iter()
                    .map(|p| [p[0] + 3.0 * k as f64, p[1] - 2.0 * k as f64])
                    .collect()
            })
            .collect();
        let set = ThresholdSet::uniform(0.1, 1e-9, 1e-9, 1.0);
        let t = track(frames);
        let table = anatomical_deviations(&t, &s).unwrap();
        assert!(table.cells.iter().flatten().all(|c| c.unwrap().abs() < 1e-12));
        assert_eq!(compute_ois(&t, &s, &set).unwrap(), 1.0);
    }

    #[test]
    fn one_violation_in_four_cells() {
        // Two components over two transitions; only the length jump at frame 2 violates.
        let s = schema(vec![[0, 1]], vec![[0, 1, 2]], Some(vec![10.0]));
        let t = track(vec![
            vec![[0.0, 0.0], [10.0, 0.0], [10.0, 10.0]],
            vec![[0.0, 0.0], [10.0, 0.0], [10.0, 10.0]],
            vec![[0.0, 0.0], [15.0, 0.0], [15.0, 10.0]],
        ]);
        let set = ThresholdSet::uniform(0.1, 0.2, 0.1, 1.0);
        let eval = evaluate_ois(&t, &s, &set).unwrap();
        assert_eq!(eval.observed, 4);
        assert_eq!(eval.violations, vec![("length:0-1".to_string(), 2)]);
        assert_eq!(eval.score, 0.75);
    }

    #[test]
    fn invisible_keypoints_are_excluded() {
        let s = schema(vec![[0, 1]], vec![], Some(vec![10.0]));
        let mut t = track(vec![
            vec![[0.0, 0.0], [10.0, 0.0], [0.0, 0.0]],
            vec![[0.0, 0.0], [50.0, 0.0], [0.0, 0.0]],
            vec![[0.0, 0.0], [50.0, 0.0], [0.0, 0.0]],
        ]);
        t.visibility[0][1] = false;
        let table = anatomical_deviations(&t, &s).unwrap();
        assert_eq!(table.cells[0], vec![None, Some(0.0)]);
        let set = ThresholdSet::uniform(0.1, 0.1, 0.1, 1.0);
        assert_eq!(compute_ois(&t, &s, &set).unwrap(), 1.0);
    }

    #[test]
    fn nothing_observed_is_empty_evidence() {
        let s = schema(vec![[0, 1]], vec![], None);
        let mut t = track(vec![vec![[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]]; 3]);
        for v in &mut t.visibility {
            v[1] = false;
        }
        let set = ThresholdSet::uniform(0.1, 0.1, 0.1, 1.0);
        assert!(matches!(compute_ois(&t, &s, &set), Err(MetricError::EmptyEvidence(_))));
    }

    #[test]
    fn schema_wider_than_track_is_mismatch() {
        let s = schema(vec![[0, 5]], vec![], None);
        let t = track(vec![vec![[0.0, 0.0]; 3]; 2]);
        assert!(matches!(
            anatomical_deviations(&t, &s),
            Err(MetricError::SchemaMismatch(_))
        ));
    }

    fn rotate(p: [f64; 2], angle: f64, shift: [f64; 2]) -> [f64; 2] {
        let (s, c) = angle.sin_cos();
        [c * p[0] - s * p[1] + shift[0], s * p[0] + c * p[1] + shift[1]]
    }

    proptest! {
        #[test]
        fn rigid_motion_keeps_integrity(
            base in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 3),
            motions in prop::collection::vec((-PI..PI, -100.0f64..100.0, -100.0f64..100.0), 2..8),
        ) {
            let base: Vec<[f64; 2]> = base.into_iter().map(|(x, y)| [x, y]).collect();
            prop_assume!(distance(base[0], base[1]) > 1.0 && distance(base[1], base[2]) > 1.0);
            let frames = motions
                .iter()
                .map(|&(a, dx, dy)| base.iter().map(|&p| rotate(p, a, [dx, dy])).collect())
                .collect();
            let s = schema(vec![[0, 1], [1, 2]], vec![[0, 1, 2]], None);
            let t = track(frames);
            let table = anatomical_deviations(&t, &s).unwrap();
            for cell in table.cells.iter().flatten() {
                prop_assert!(cell.unwrap() < 1e-9);
            }
            let set = ThresholdSet::uniform(0.1, 1e-6, 1e-6, 1.0);
            prop_assert_eq!(compute_ois(&t, &s, &set).unwrap(), 1.0);
        }

        #[test]
        fn uniform_rescaling_preserves_score(
            frames in prop::collection::vec(prop::collection::vec((0.0f64..100.0, 0.0f64..100.0), 3), 2..6),
            exp in -3i32..4,
        ) {
            let c = 2f64.powi(exp);
            let frames: Vec<Vec<[f64; 2]>> = frames
                .into_iter()
                .map(|f| f.into_iter().map(|(x, y)| [x, y]).collect())
                .collect();
            let scaled = frames
                .iter()
                .map(|f| f.iter().map(|p| [p[0] * c, p[1] * c]).collect())
                .collect();
            let s = schema(vec![[0, 1], [1, 2]], vec![[0, 1, 2]], None);
            let set = ThresholdSet::uniform(0.1, 0.1, 0.2, 1.0);
            let a = compute_ois(&track(frames), &s, &set);
            let b = compute_ois(&track(scaled), &s, &set);
            match (a, b) {
                (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
                (Err(_), Err(_)) => {}
                (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
            }
        }
    }
}
