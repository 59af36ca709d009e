//! Feature bundle data model and its JSON serialization.
//!
//! A bundle is the contract between upstream perception extraction and the scoring
//! engine. Every per-frame series inside a bundle has exactly `frame_count` entries
//! and arrays are stored frame-major.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Format identifier written into every bundle document.
pub const SCHEMA_VERSION: &str = "vmbench-bundle/1";

/// Tolerance on the probability simplex constraint.
pub const PROB_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum BundleError {
    /// Structural problem: unknown version, missing field, array shape mismatch.
    #[error("schema error: {0}")]
    Schema(String),
    /// Well-shaped document carrying an out-of-range value.
    #[error("value error: {0}")]
    Value(String),
}

impl BundleError {
    pub fn is_schema(&self) -> bool {
        matches!(self, BundleError::Schema(_))
    }

    pub fn is_value(&self) -> bool {
        matches!(self, BundleError::Value(_))
    }
}

fn schema(msg: impl Into<String>) -> BundleError {
    BundleError::Schema(msg.into())
}

fn value(msg: impl Into<String>) -> BundleError {
    BundleError::Value(msg.into())
}

/// Six coarse movement modes used to organise prompts and scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MovementMode {
    FluidDynamics,
    BiologicalMotion,
    MechanicalMotion,
    WeatherPhenomena,
    CollectiveBehavior,
    EnergyTransfer,
}

impl MovementMode {
    pub const ALL: [MovementMode; 6] = [
        MovementMode::FluidDynamics,
        MovementMode::BiologicalMotion,
        MovementMode::MechanicalMotion,
        MovementMode::WeatherPhenomena,
        MovementMode::CollectiveBehavior,
        MovementMode::EnergyTransfer,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MovementMode::FluidDynamics => "fluid_dynamics",
            MovementMode::BiologicalMotion => "biological_motion",
            MovementMode::MechanicalMotion => "mechanical_motion",
            MovementMode::WeatherPhenomena => "weather_phenomena",
            MovementMode::CollectiveBehavior => "collective_behavior",
            MovementMode::EnergyTransfer => "energy_transfer",
        }
    }
}

impl fmt::Display for MovementMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MovementMode {
    type Err = String;

    /// Accepts the snake_case tag as well as the spaced form ("biological motion").
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace([' ', '-'], "_");
        MovementMode::ALL
            .into_iter()
            .find(|m| m.as_str() == norm)
            .ok_or_else(|| format!("unknown movement mode {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneContext {
    /// Scenario label used to index per-scenario thresholds, e.g. `biological_motion/walking`.
    pub scenario_id: String,
    pub movement_mode: MovementMode,
}

/// Native range of the upstream quality scorer, recorded so the stored `[0,1]`
/// values can be mapped back.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QualityNormalization {
    pub native_min: f64,
    pub native_max: f64,
}

/// Per-frame aesthetic quality, min-max normalised to `[0,1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameQualitySeries {
    pub q: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<QualityNormalization>,
}

impl FrameQualitySeries {
    pub fn new(q: Vec<f64>) -> Self {
        Self { q, normalization: None }
    }

    /// Normalises raw scorer output from `[native_min, native_max]` into `[0,1]`,
    /// clamping values that fall outside the declared range.
    pub fn from_native(raw: &[f64], native_min: f64, native_max: f64) -> Result<Self, BundleError> {
        if !(native_min.is_finite() && native_max.is_finite() && native_max > native_min) {
            return Err(value(format!(
                "invalid native quality range [{native_min}, {native_max}]"
            )));
        }
        let span = native_max - native_min;
        let q = raw.iter().map(|&v| ((v - native_min) / span).clamp(0.0, 1.0)).collect();
        Ok(Self {
            q,
            normalization: Some(QualityNormalization { native_min, native_max }),
        })
    }
}

/// Detected keypoints of one subject over the whole clip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeypointTrack {
    pub subject_id: String,
    /// References a [`crate::skeleton::SkeletonSchema`] in the registry.
    pub schema_id: String,
    /// `frame_count × n_keypoints` pixel coordinates.
    pub positions: Vec<Vec<[f64; 2]>>,
    /// `frame_count × n_keypoints` visibility flags.
    pub visibility: Vec<Vec<bool>>,
}

impl KeypointTrack {
    pub fn keypoint_count(&self) -> usize {
        self.positions.first().map_or(0, Vec::len)
    }

    pub fn frame_count(&self) -> usize {
        self.positions.len()
    }
}

/// An axis-aligned box `[x_min, y_min, x_max, y_max]` in pixels.
pub type BBox = [f64; 4];

/// One segmented and tracked object instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceTrack {
    pub object_id: String,
    pub present: Vec<bool>,
    pub bbox: Vec<Option<BBox>>,
    pub area: Vec<Option<f64>>,
    pub centroid: Vec<Option<[f64; 2]>>,
}

impl InstanceTrack {
    /// Builds a track from per-frame boxes; area and centroid are taken from the box.
    pub fn from_boxes(object_id: impl Into<String>, boxes: Vec<Option<BBox>>) -> Self {
        let present = boxes.iter().map(Option::is_some).collect();
        let area = boxes.iter().map(|b| b.map(|b| (b[2] - b[0]) * (b[3] - b[1]))).collect();
        let centroid = boxes
            .iter()
            .map(|b| b.map(|b| [(b[0] + b[2]) / 2.0, (b[1] + b[3]) / 2.0]))
            .collect();
        Self {
            object_id: object_id.into(),
            present,
            bbox: boxes,
            area,
            centroid,
        }
    }

    pub fn frame_count(&self) -> usize {
        self.present.len()
    }
}

/// Dense point tracks on one subject.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointTrajectory {
    pub subject_id: String,
    /// True for prompt-designated movers, false for passively moving elements.
    pub active: bool,
    /// `frame_count × n_points` pixel coordinates.
    pub points: Vec<Vec<[f64; 2]>>,
    pub visible: Vec<Vec<bool>>,
}

impl PointTrajectory {
    pub fn point_count(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }
}

/// Predicted probabilities for Bad, Poor, Fair, Good, Perfect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassProbabilities {
    pub p: [f64; 5],
}

impl ClassProbabilities {
    /// Validates the simplex constraint.
    pub fn new(p: [f64; 5]) -> Result<Self, BundleError> {
        let probs = Self { p };
        probs.validate()?;
        Ok(probs)
    }

    pub fn validate(&self) -> Result<(), BundleError> {
        if let Some(bad) = self.p.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(value(format!("class probability {bad} is negative or non-finite")));
        }
        let sum: f64 = self.p.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(value(format!("class probabilities sum to {sum}, expected 1")));
        }
        Ok(())
    }
}

/// Everything the scoring engine needs for one video.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureBundle {
    pub schema_version: String,
    pub video_id: String,
    pub prompt_id: String,
    pub frame_count: usize,
    pub fps: f64,
    pub width: u32,
    pub height: u32,
    pub scene: SceneContext,
    pub quality: FrameQualitySeries,
    #[serde(default)]
    pub keypoint_tracks: Vec<KeypointTrack>,
    #[serde(default)]
    pub instance_tracks: Vec<InstanceTrack>,
    #[serde(default)]
    pub trajectories: Vec<PointTrajectory>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_probs: Option<ClassProbabilities>,
}

impl FeatureBundle {
    /// Checks every structural and value invariant of the bundle.
    pub fn validate(&self) -> Result<(), BundleError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(schema(format!(
                "unsupported schema_version {:?} (expected {SCHEMA_VERSION:?})",
                self.schema_version
            )));
        }
        let t = self.frame_count;
        if t < 2 {
            return Err(schema(format!("frame_count must be at least 2, got {t}")));
        }
        if self.video_id.is_empty() {
            return Err(value("video_id is empty"));
        }
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return Err(value(format!("fps must be positive, got {}", self.fps)));
        }
        if self.width == 0 || self.height == 0 {
            return Err(value(format!(
                "frame geometry must be positive, got {}x{}",
                self.width, self.height
            )));
        }
        if self.scene.scenario_id.is_empty() {
            return Err(value("scene.scenario_id is empty"));
        }

        check_len("quality.q", self.quality.q.len(), t)?;
        if let Some(bad) = self.quality.q.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(value(format!("quality value {bad} outside [0,1]")));
        }
        if let Some(n) = self.quality.normalization {
            if !(n.native_min.is_finite() && n.native_max.is_finite() && n.native_max > n.native_min) {
                return Err(value("quality.normalization range is empty or non-finite"));
            }
        }

        for track in &self.keypoint_tracks {
            let ctx = format!("keypoint_tracks[{}]", track.subject_id);
            check_grid(&ctx, &track.positions, &track.visibility, t)?;
        }

        for inst in &self.instance_tracks {
            validate_instance(inst, t)?;
        }

        for traj in &self.trajectories {
            let ctx = format!("trajectories[{}]", traj.subject_id);
            check_grid(&ctx, &traj.points, &traj.visible, t)?;
            if traj.point_count() == 0 {
                return Err(schema(format!("{ctx}: at least one tracked point is required")));
            }
        }

        if let Some(probs) = &self.class_probs {
            probs.validate()?;
        }
        Ok(())
    }
}

fn check_len(what: &str, got: usize, expected: usize) -> Result<(), BundleError> {
    if got != expected {
        return Err(schema(format!("{what} has length {got}, expected {expected}")));
    }
    Ok(())
}

fn check_grid(ctx: &str, coords: &[Vec<[f64; 2]>], flags: &[Vec<bool>], frames: usize) -> Result<(), BundleError> {
    check_len(&format!("{ctx}.coordinates"), coords.len(), frames)?;
    check_len(&format!("{ctx}.flags"), flags.len(), frames)?;
    let width = coords[0].len();
    for (f, (row, vis)) in coords.iter().zip(flags).enumerate() {
        if row.len() != width || vis.len() != width {
            return Err(schema(format!(
                "{ctx}: frame {f} has {} coordinates and {} flags, expected {width}",
                row.len(),
                vis.len()
            )));
        }
        if row.iter().flatten().any(|c| !c.is_finite()) {
            return Err(value(format!("{ctx}: non-finite coordinate at frame {f}")));
        }
    }
    Ok(())
}

fn validate_instance(inst: &InstanceTrack, frames: usize) -> Result<(), BundleError> {
    let ctx = format!("instance_tracks[{}]", inst.object_id);
    check_len(&format!("{ctx}.present"), inst.present.len(), frames)?;
    check_len(&format!("{ctx}.bbox"), inst.bbox.len(), frames)?;
    check_len(&format!("{ctx}.area"), inst.area.len(), frames)?;
    check_len(&format!("{ctx}.centroid"), inst.centroid.len(), frames)?;
    for f in 0..frames {
        let present = inst.present[f];
        let defined = [
            inst.bbox[f].is_some(),
            inst.area[f].is_some(),
            inst.centroid[f].is_some(),
        ];
        if defined.iter().any(|&d| d != present) {
            return Err(schema(format!(
                "{ctx}: bbox/area/centroid must be defined exactly on present frames (frame {f})"
            )));
        }
        if let Some(b) = inst.bbox[f] {
            if b.iter().any(|v| !v.is_finite()) || b[0] >= b[2] || b[1] >= b[3] {
                return Err(value(format!("{ctx}: degenerate bbox {b:?} at frame {f}")));
            }
        }
        if let Some(a) = inst.area[f] {
            if !a.is_finite() || a < 0.0 {
                return Err(value(format!("{ctx}: negative or non-finite area {a} at frame {f}")));
            }
        }
        if let Some(c) = inst.centroid[f] {
            if c.iter().any(|v| !v.is_finite()) {
                return Err(value(format!("{ctx}: non-finite centroid at frame {f}")));
            }
        }
    }
    Ok(())
}

/// Parses and validates one bundle document.
pub fn parse_bundle(bytes: &[u8]) -> Result<FeatureBundle, BundleError> {
    let bundle: FeatureBundle = serde_json::from_slice(bytes).map_err(|e| {
        if e.is_data() || e.is_syntax() || e.is_eof() {
            schema(e.to_string())
        } else {
            schema(format!("unreadable bundle: {e}"))
        }
    })?;
    bundle.validate()?;
    Ok(bundle)
}

/// Serializes a bundle as pretty-printed JSON. Output is deterministic: field order
/// follows the type definitions and floats use shortest round-trip formatting.
pub fn serialize_bundle(bundle: &FeatureBundle) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(bundle).expect("bundle serialization is infallible");
    out.push(b'\n');
    out
}
