//! Perceptible amplitude: saturating ratio of active-subject displacement to the
//! scenario's perceptual threshold, averaged over the clip.

use super::MetricError;
use crate::bundle::{PointTrajectory, SceneContext};
use crate::thresholds::ThresholdSet;

#[derive(Debug, Clone, PartialEq)]
pub struct PasEvaluation {
    pub score: f64,
    /// Mean displacement of visible active points per transition (`[t-1]` for frame `t`).
    pub amplitudes: Vec<f64>,
    pub threshold: f64,
}

/// Mean displacement of active, visible points for every transition.
///
/// A point contributes at transition `t` when it is visible in frames `t-1` and
/// `t`. Transitions with no contributing point have amplitude 0.
pub fn frame_amplitudes(trajectories: &[PointTrajectory]) -> Result<Vec<f64>, MetricError> {
    let active: Vec<&PointTrajectory> = trajectories.iter().filter(|t| t.active).collect();
    if active.is_empty() {
        return Err(MetricError::NoActiveSubject);
    }
    let frames = active[0].points.len();
    if active.iter().any(|t| t.points.len() != frames) {
        return Err(MetricError::InvalidInput(
            "active trajectories disagree on frame count".into(),
        ));
    }
    let amplitudes = (1..frames)
        .map(|t| {
            let mut total = 0.0;
            let mut count = 0usize;
            for traj in &active {
                for (i, (&cur, &prev)) in traj.points[t].iter().zip(&traj.points[t - 1]).enumerate() {
                    if traj.visible[t][i] && traj.visible[t - 1][i] {
                        total += (cur[0] - prev[0]).hypot(cur[1] - prev[1]);
                        count += 1;
                    }
                }
            }
            if count == 0 {
                0.0
            } else {
                total / count as f64
            }
        })
        .collect();
    Ok(amplitudes)
}

pub fn evaluate_pas(
    trajectories: &[PointTrajectory],
    thresholds: &ThresholdSet,
    scene: &SceneContext,
) -> Result<PasEvaluation, MetricError> {
    let threshold = thresholds.pas_for(&scene.scenario_id)?;
    let amplitudes = frame_amplitudes(trajectories)?;
    let frames = amplitudes.len() + 1;
    let total: f64 = amplitudes.iter().map(|a| (a / threshold).min(1.0)).sum();
    Ok(PasEvaluation {
        score: total / frames as f64,
        amplitudes,
        threshold,
    })
}

pub fn compute_pas(
    trajectories: &[PointTrajectory],
    thresholds: &ThresholdSet,
    scene: &SceneContext,
) -> Result<f64, MetricError> {
    evaluate_pas(trajectories, thresholds, scene).map(|e| e.score)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::MovementMode;
    use proptest::prelude::*;

    fn scene() -> SceneContext {
        SceneContext {
            scenario_id: "s".into(),
            movement_mode: MovementMode::MechanicalMotion,
        }
    }

    fn traj(active: bool, points: Vec<Vec<[f64; 2]>>) -> PointTrajectory {
        let visible = points.iter().map(|f| vec![true; f.len()]).collect();
        PointTrajectory {
            subject_id: "s".into(),
            active,
            points,
            visible,
        }
    }

    fn set(tau: f64) -> ThresholdSet {
        ThresholdSet::uniform(0.1, 0.1, 0.1, tau)
    }

    #[test]
    fn static_subject_scores_zero() {
        let t = traj(true, vec![vec![[3.0, 4.0], [1.0, 1.0]]; 5]);
        assert_eq!(compute_pas(&[t], &set(2.0), &scene()).unwrap(), 0.0);
    }

    #[test]
    fn saturated_motion_scores_t_minus_one_over_t() {
        let frames = 6;
        let t = traj(true, (0..frames).map(|k| vec![[2.0 * k as f64, 0.0]]).collect());
        let score = compute_pas(&[t], &set(2.0), &scene()).unwrap();
        assert!((score - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn two_points_three_and_five_pixels() {
        let t = traj(
            true,
            (0..11)
                .map(|k| vec![[3.0 * k as f64, 0.0], [0.0, 5.0 * k as f64]])
                .collect(),
        );
        let e = evaluate_pas(&[t], &set(10.0), &scene()).unwrap();
        assert!(e.amplitudes.iter().all(|&a| (a - 4.0).abs() < 1e-12));
        assert!((e.score - 0.4 * 10.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn passive_elements_ignored() {
        let moving = traj(false, (0..4).map(|k| vec![[100.0 * k as f64, 0.0]]).collect());
        let still = traj(true, vec![vec![[0.0, 0.0]]; 4]);
        assert_eq!(compute_pas(&[moving.clone(), still], &set(1.0), &scene()).unwrap(), 0.0);
        assert_eq!(
            compute_pas(&[moving], &set(1.0), &scene()),
            Err(MetricError::NoActiveSubject)
        );
    }

    #[test]
    fn unobserved_transition_contributes_zero() {
        let mut t = traj(true, (0..3).map(|k| vec![[10.0 * k as f64, 0.0]]).collect());
        t.visible[1][0] = false;
        let e = evaluate_pas(&[t], &set(10.0), &scene()).unwrap();
        assert_eq!(e.amplitudes, vec![0.0, 0.0]);
    }

    proptest! {
        #[test]
        fn constant_drift_gives_drift_magnitude(
            pts in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 1..5),
            dx in -10.0f64..10.0,
            dy in -10.0f64..10.0,
            frames in 2usize..8,
        ) {
            let points = (0..frames)
                .map(|k| pts.iter().map(|&(x, y)| [x + dx * k as f64, y + dy * k as f64]).collect())
                .collect();
            let amps = frame_amplitudes(&[traj(true, points)]).unwrap();
            for a in amps {
                prop_assert!((a - dx.hypot(dy)).abs() < 1e-9);
            }
        }

        #[test]
        fn score_in_unit_interval(
            points in prop::collection::vec(prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 2), 2..8),
            tau in 0.1f64..20.0,
        ) {
            let points = points.into_iter().map(|f| f.into_iter().map(|(x, y)| [x, y]).collect()).collect();
            let s = compute_pas(&[traj(true, points)], &set(tau), &scene()).unwrap();
            prop_assert!((0.0..=1.0).contains(&s));
        }
    }
}
