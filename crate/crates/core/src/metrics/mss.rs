//! Motion smoothness: fraction of frame transitions whose quality drop stays
//! within the scenario tolerance.
//!
//! The sum runs over transitions `t = 2..T` but is divided by `T`, so a clip with
//! no violations scores 1 and every violation costs `1/T`.

use super::MetricError;
use crate::bundle::{FrameQualitySeries, SceneContext};
use crate::thresholds::ThresholdSet;

#[derive(Debug, Clone, PartialEq)]
pub struct MssEvaluation {
    pub score: f64,
    /// Zero-based frame indices `t` where `q[t-1] - q[t]` exceeded the threshold.
    pub violating_frames: Vec<usize>,
}

/// Quality drop `q[t-1] - q[t]` for every transition; positive values are drops.
pub fn quality_drops(q: &[f64]) -> Vec<f64> {
    q.windows(2).map(|w| w[0] - w[1]).collect()
}

/// Constant per-scenario threshold.
pub fn compute_mss(
    quality: &FrameQualitySeries,
    thresholds: &ThresholdSet,
    scene: &SceneContext,
) -> Result<f64, MetricError> {
    evaluate_mss(quality, thresholds, scene, None).map(|e| e.score)
}

/// `amplitudes[t-1]` is the motion amplitude at transition `t`; it only matters when
/// the scenario threshold carries an amplitude coefficient.
pub fn evaluate_mss(
    quality: &FrameQualitySeries,
    thresholds: &ThresholdSet,
    scene: &SceneContext,
    amplitudes: Option<&[f64]>,
) -> Result<MssEvaluation, MetricError> {
    let q = &quality.q;
    let frames = q.len();
    if frames < 2 {
        return Err(MetricError::InvalidInput(format!(
            "quality series needs at least 2 frames, got {frames}"
        )));
    }
    if let Some(a) = amplitudes {
        if a.len() != frames - 1 {
            return Err(MetricError::InvalidInput(format!(
                "{} amplitudes for {} transitions",
                a.len(),
                frames - 1
            )));
        }
    }
    let tau = thresholds.mss_for(&scene.scenario_id)?;
    let violating_frames: Vec<usize> = quality_drops(q)
        .into_iter()
        .enumerate()
        .filter(|&(i, drop)| drop > tau.at(amplitudes.map(|a| a[i])))
        .map(|(i, _)| i + 1)
        .collect();
    let score = 1.0 - violating_frames.len() as f64 / frames as f64;
    Ok(MssEvaluation {
        score,
        violating_frames,
    })
}
