//! The five motion scores and the per-video report.

pub mod cas;
pub mod mss;
pub mod ois;
pub mod pas;
pub mod tcs;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cas::compute_cas;
pub use mss::{compute_mss, evaluate_mss};
pub use ois::{anatomical_deviations, compute_ois, evaluate_ois};
pub use pas::{compute_pas, evaluate_pas, frame_amplitudes};
pub use tcs::{compute_tcs, evaluate_tcs, legitimate_transition, FrameGeometry};

use crate::bundle::FeatureBundle;
use crate::dimension::Dimension;
use crate::skeleton::SkeletonRegistry;
use crate::thresholds::{ThresholdError, ThresholdSet};

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    MissingThreshold(#[from] ThresholdError),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("no evidence: {0}")]
    EmptyEvidence(String),
    #[error("no active subject among the trajectories")]
    NoActiveSubject,
}

/// Quality weight of each commonsense level, Bad through Perfect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MosMapping {
    g: [f64; 5],
}

impl Default for MosMapping {
    fn default() -> Self {
        Self {
            g: [0.0, 0.25, 0.5, 0.75, 1.0],
        }
    }
}

impl MosMapping {
    /// Weights must be strictly increasing from 0 to 1.
    pub fn new(g: [f64; 5]) -> Result<Self, MetricError> {
        let increasing = g.windows(2).all(|w| w[0] < w[1]);
        if !increasing || g[0] != 0.0 || g[4] != 1.0 {
            return Err(MetricError::InvalidInput(format!(
                "MOS weights must increase strictly from 0 to 1, got {g:?}"
            )));
        }
        Ok(Self { g })
    }

    pub fn weights(&self) -> &[f64; 5] {
        &self.g
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OisViolation {
    pub subject_id: String,
    pub component: String,
    pub frame: usize,
}

/// Evidence behind the scores.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Reason for every absent score.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub absent: BTreeMap<Dimension, String>,
    /// Non-fatal problems, e.g. a keypoint track with an unknown schema.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mss_violating_frames: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ois_violations: Vec<OisViolation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tcs_anomalous: Vec<String>,
}

/// Five unit-interval scores plus their mean. Absent scores are `None` and are
/// left out of the average.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionScoreReport {
    pub video_id: String,
    pub cas: Option<f64>,
    pub mss: Option<f64>,
    pub ois: Option<f64>,
    pub pas: Option<f64>,
    pub tcs: Option<f64>,
    pub average: Option<f64>,
    #[serde(default)]
    pub diagnostics: Diagnostics,
}

impl MotionScoreReport {
    pub fn from_scores(video_id: impl Into<String>, scores: [Option<f64>; 5]) -> Self {
        let [cas, mss, ois, pas, tcs] = scores;
        Self {
            video_id: video_id.into(),
            cas,
            mss,
            ois,
            pas,
            tcs,
            average: mean_present(&scores),
            diagnostics: Diagnostics::default(),
        }
    }

    pub fn score(&self, dim: Dimension) -> Option<f64> {
        self.scores()[dim.index()]
    }

    pub fn scores(&self) -> [Option<f64>; 5] {
        [self.cas, self.mss, self.ois, self.pas, self.tcs]
    }

    /// Mean of the present scores among `dims`.
    pub fn subset_average(&self, dims: &[Dimension]) -> Option<f64> {
        let picked: Vec<Option<f64>> = dims.iter().map(|&d| self.score(d)).collect();
        mean_present(&picked)
    }
}

pub fn mean_present(scores: &[Option<f64>]) -> Option<f64> {
    let present: Vec<f64> = scores.iter().flatten().copied().collect();
    if present.is_empty() {
        None
    } else {
        Some(present.iter().sum::<f64>() / present.len() as f64)
    }
}

fn builtin_registry() -> &'static SkeletonRegistry {
    static REGISTRY: OnceLock<SkeletonRegistry> = OnceLock::new();
    REGISTRY.get_or_init(SkeletonRegistry::builtin)
}

/// Scores one bundle with the builtin skeleton registry.
pub fn score_bundle(bundle: &FeatureBundle, thresholds: &ThresholdSet, mapping: &MosMapping) -> MotionScoreReport {
    score_bundle_with(bundle, thresholds, mapping, builtin_registry())
}

/// Runs all five metrics. A metric that cannot be computed is reported absent with
/// its reason in the diagnostics; the report itself is always produced.
pub fn score_bundle_with(
    bundle: &FeatureBundle,
    thresholds: &ThresholdSet,
    mapping: &MosMapping,
    registry: &SkeletonRegistry,
) -> MotionScoreReport {
    let mut diag = Diagnostics::default();
    fn absent(diag: &mut Diagnostics, dim: Dimension, reason: String) -> Option<f64> {
        diag.absent.insert(dim, reason);
        None
    }

    let cas = match &bundle.class_probs {
        None => absent(&mut diag, Dimension::Cas, "no class probabilities in bundle".into()),
        Some(p) => compute_cas(p, mapping).map_or_else(|e| absent(&mut diag, Dimension::Cas, e.to_string()), Some),
    };

    // Amplitudes feed both PAS and the adaptive MSS threshold.
    let pas_eval = evaluate_pas(&bundle.trajectories, thresholds, &bundle.scene);
    let amplitudes = match (&pas_eval, thresholds.mss_for(&bundle.scene.scenario_id)) {
        (Ok(e), Ok(t)) if t.amplitude_coeff.is_some() => Some(e.amplitudes.as_slice()),
        _ => None,
    };
    let mss = match evaluate_mss(&bundle.quality, thresholds, &bundle.scene, amplitudes) {
        Ok(e) => {
            diag.mss_violating_frames = e.violating_frames;
            Some(e.score)
        }
        Err(e) => absent(&mut diag, Dimension::Mss, e.to_string()),
    };

    let pas = match pas_eval {
        Ok(e) => Some(e.score),
        Err(e) => absent(&mut diag, Dimension::Pas, e.to_string()),
    };

    let mut observed = 0usize;
    let mut intact = 0usize;
    for track in &bundle.keypoint_tracks {
        let Some(schema) = registry.get(&track.schema_id) else {
            diag.warnings.push(format!(
                "keypoint track {}: unknown skeleton schema {:?}",
                track.subject_id, track.schema_id
            ));
            continue;
        };
        match anatomical_deviations(track, schema) {
            Ok(table) => {
                let e = ois::evaluate_table(&table, &schema.schema_id, thresholds);
                observed += e.observed;
                intact += e.intact;
                diag.ois_violations
                    .extend(e.violations.into_iter().map(|(component, frame)| OisViolation {
                        subject_id: track.subject_id.clone(),
                        component,
                        frame,
                    }));
            }
            Err(e) => diag.warnings.push(format!("keypoint track {}: {e}", track.subject_id)),
        }
    }
    let ois = if observed == 0 {
        absent(
            &mut diag,
            Dimension::Ois,
            MetricError::EmptyEvidence("no skeleton component observed in consecutive frames".into()).to_string(),
        )
    } else {
        Some(intact as f64 / observed as f64)
    };

    let geometry = FrameGeometry::new(bundle.width, bundle.height);
    let tcs = match evaluate_tcs(&bundle.instance_tracks, geometry, &thresholds.tcs_rules) {
        Ok(e) => {
            diag.tcs_anomalous = e.anomalous;
            Some(e.score)
        }
        Err(e) => absent(&mut diag, Dimension::Tcs, e.to_string()),
    };

    let mut report = MotionScoreReport::from_scores(bundle.video_id.clone(), [cas, mss, ois, pas, tcs]);
    report.diagnostics = diag;
    report
}
