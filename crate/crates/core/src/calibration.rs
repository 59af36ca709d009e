//! Derives a [`ThresholdSet`] from reference (natural-video) bundles.
//!
//! * MSS: per scenario, quantile of the positive frame-to-frame quality drops.
//! * OIS: quantile of all observed length deviations and of all observed angle
//!   deviations, pooled over the corpus.
//! * PAS: per scenario, quantile of the per-transition mean displacement of
//!   active subjects.
//!
//! A scenario with fewer than `min_samples` samples for a metric gets no entry of
//! its own and resolves to the corpus-wide value at scoring time. A corpus-wide
//! pool below `min_samples` resolves to the floor.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::bundle::FeatureBundle;
use crate::metrics::{anatomical_deviations, frame_amplitudes, mss::quality_drops};
use crate::skeleton::{ComponentKind, SkeletonRegistry};
use crate::thresholds::{
    Fallbacks, InsufficientEvidence, MssThreshold, OisThresholds, Provenance, TcsRules, ThresholdOverrides,
    ThresholdSet,
};

#[derive(Debug, Error, PartialEq)]
pub enum CalibrationError {
    #[error("quantile needs at least one sample")]
    EmptySamples,
    #[error("quantile level {0} outside (0,1)")]
    InvalidLevel(f64),
    #[error("sample {0} is not finite")]
    NonFinite(f64),
    #[error("reference corpus is empty")]
    EmptyReference,
}

/// q-quantile with linear interpolation between order statistics: the value at
/// fractional rank `(n - 1) * q` of the sorted samples.
pub fn empirical_quantile(samples: &[f64], q: f64) -> Result<f64, CalibrationError> {
    if !(q > 0.0 && q < 1.0) {
        return Err(CalibrationError::InvalidLevel(q));
    }
    if samples.is_empty() {
        return Err(CalibrationError::EmptySamples);
    }
    if let Some(&bad) = samples.iter().find(|v| !v.is_finite()) {
        return Err(CalibrationError::NonFinite(bad));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    Ok(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationOptions {
    /// Identifier of the reference corpus, recorded in provenance.
    pub corpus_id: String,
    /// Minimum samples per (scenario, metric) before a dedicated threshold is trusted.
    pub min_samples: usize,
    /// Lower bound for every calibrated threshold.
    pub floor: f64,
    pub tcs_rules: TcsRules,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self {
            corpus_id: String::new(),
            min_samples: 30,
            floor: 1e-3,
            tcs_rules: TcsRules::default(),
        }
    }
}

pub const DEFAULT_QUANTILE: f64 = 0.99;

#[derive(Default)]
struct Samples {
    mss: BTreeMap<String, Vec<f64>>,
    pas: BTreeMap<String, Vec<f64>>,
    length: Vec<f64>,
    angle: Vec<f64>,
}

fn collect(reference: &[FeatureBundle], registry: &SkeletonRegistry) -> Samples {
    let mut s = Samples::default();
    for bundle in reference {
        let scenario = bundle.scene.scenario_id.clone();
        s.mss
            .entry(scenario.clone())
            .or_default()
            .extend(quality_drops(&bundle.quality.q).into_iter().filter(|&d| d > 0.0));
        let pas = s.pas.entry(scenario).or_default();
        // Frames where no active point is observed say nothing about natural motion.
        if let Ok(amps) = frame_amplitudes(&bundle.trajectories) {
            let active: Vec<_> = bundle.trajectories.iter().filter(|t| t.active).collect();
            for (i, a) in amps.into_iter().enumerate() {
                let observed = active
                    .iter()
                    .any(|t| t.visible[i].iter().zip(&t.visible[i + 1]).any(|(&p, &c)| p && c));
                if observed {
                    pas.push(a);
                }
            }
        }
        for track in &bundle.keypoint_tracks {
            let Some(schema) = registry.get(&track.schema_id) else {
                continue;
            };
            let Ok(table) = anatomical_deviations(track, schema) else {
                continue;
            };
            for (component, column) in table.components.iter().zip(&table.cells) {
                let target = match component.kind() {
                    ComponentKind::Length => &mut s.length,
                    ComponentKind::Angle => &mut s.angle,
                };
                target.extend(column.iter().flatten());
            }
        }
    }
    s
}

struct Resolver<'a> {
    q: f64,
    opts: &'a CalibrationOptions,
    provenance: &'a mut Provenance,
}

impl Resolver<'_> {
    /// Quantile of `samples` when there are enough of them, `None` otherwise.
    fn trusted(&mut self, metric: &str, scenario: &str, samples: &[f64]) -> Option<f64> {
        self.provenance
            .sample_counts
            .insert(format!("{metric}/{scenario}"), samples.len());
        if samples.len() < self.opts.min_samples {
            return None;
        }
        let v = empirical_quantile(samples, self.q).expect("level and samples checked");
        Some(v.max(self.opts.floor))
    }

    fn global(&mut self, metric: &str, samples: &[f64]) -> f64 {
        match self.trusted(metric, "*", samples) {
            Some(v) => v,
            None => {
                self.provenance.insufficient.push(InsufficientEvidence {
                    scenario: "*".into(),
                    metric: metric.into(),
                    samples: samples.len(),
                    resolution: format!("floor {}", self.opts.floor),
                });
                self.opts.floor
            }
        }
    }

    fn per_scenario(&mut self, metric: &str, pools: &BTreeMap<String, Vec<f64>>) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        for (scenario, samples) in pools {
            match self.trusted(metric, scenario, samples) {
                Some(v) => {
                    out.insert(scenario.clone(), v);
                }
                None => self.provenance.insufficient.push(InsufficientEvidence {
                    scenario: scenario.clone(),
                    metric: metric.into(),
                    samples: samples.len(),
                    resolution: "global fallback".into(),
                }),
            }
        }
        out
    }
}

/// Calibrates with the builtin skeleton registry.
pub fn calibrate(
    reference: &[FeatureBundle],
    q: f64,
    overrides: &ThresholdOverrides,
    opts: &CalibrationOptions,
) -> Result<ThresholdSet, CalibrationError> {
    calibrate_with(reference, q, overrides, opts, &SkeletonRegistry::builtin())
}

pub fn calibrate_with(
    reference: &[FeatureBundle],
    q: f64,
    overrides: &ThresholdOverrides,
    opts: &CalibrationOptions,
    registry: &SkeletonRegistry,
) -> Result<ThresholdSet, CalibrationError> {
    if !(q > 0.0 && q < 1.0) {
        return Err(CalibrationError::InvalidLevel(q));
    }
    if reference.is_empty() {
        return Err(CalibrationError::EmptyReference);
    }
    let samples = collect(reference, registry);
    let mut provenance = Provenance {
        reference_corpus: opts.corpus_id.clone(),
        quantile: Some(q),
        min_samples: Some(opts.min_samples),
        ..Provenance::default()
    };
    let mut r = Resolver {
        q,
        opts,
        provenance: &mut provenance,
    };

    let all_mss: Vec<f64> = samples.mss.values().flatten().copied().collect();
    let all_pas: Vec<f64> = samples.pas.values().flatten().copied().collect();
    let mss_global = r.global("mss", &all_mss);
    let pas_global = r.global("pas", &all_pas);
    let length = r.global("ois.length", &samples.length);
    let angle = r.global("ois.angle", &samples.angle);
    let mss = r
        .per_scenario("mss", &samples.mss)
        .into_iter()
        .map(|(s, v)| (s, MssThreshold::constant(v)))
        .collect();
    let pas = r.per_scenario("pas", &samples.pas);

    let mut set = ThresholdSet {
        mss,
        ois: OisThresholds {
            length,
            angle,
            per_component: BTreeMap::new(),
        },
        pas,
        tcs_rules: opts.tcs_rules,
        fallback: Fallbacks {
            mss: Some(MssThreshold::constant(mss_global)),
            pas: Some(pas_global),
        },
        provenance,
    };
    overrides.apply(&mut set);
    Ok(set)
}
