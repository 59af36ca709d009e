//! Motion-quality evaluation over pre-extracted perception features.
//!
//! The crate is organised around the feature bundle ([`bundle::FeatureBundle`]), a
//! per-video document carrying everything the scorers need: a normalised per-frame
//! quality series, keypoint tracks, instance tracks, dense point trajectories and a
//! five-level commonsense class distribution.
//!
//! * [`metrics`] computes the five motion scores (CAS, MSS, OIS, PAS, TCS) and the
//!   per-video report.
//! * [`calibration`] derives every tolerance in a [`thresholds::ThresholdSet`] from
//!   reference-clip statistics.
//! * [`validation`] aggregates Likert annotations and measures agreement between
//!   scores and human ratings (Spearman correlation, pairwise accuracy, ablations).
//! * [`prompts`] holds the prompt-suite metadata model, sampling and the
//!   generate/verify/judge pipeline bookkeeping.

pub mod bundle;
pub mod calibration;
pub mod dimension;
pub mod metrics;
pub mod prompts;
pub mod skeleton;
pub mod synth;
pub mod thresholds;
pub mod validation;

pub use bundle::{parse_bundle, serialize_bundle, BundleError, FeatureBundle};
pub use dimension::Dimension;
pub use metrics::{score_bundle, MosMapping, MotionScoreReport};
pub use thresholds::ThresholdSet;
