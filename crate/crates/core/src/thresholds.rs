//! Calibrated tolerances consumed by the scorers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::skeleton::{Component, ComponentKind};

#[derive(Debug, Error, PartialEq)]
pub enum ThresholdError {
    #[error("no {metric} threshold for scenario {scenario:?} and no fallback")]
    Missing { metric: &'static str, scenario: String },
    #[error("invalid threshold {name}: {reason}")]
    Invalid { name: String, reason: String },
}

/// Quality-drop tolerance for one scenario.
///
/// The per-transition threshold is `base * (1 + amplitude_coeff * amplitude_t)` where
/// `amplitude_t` is the mean active-point displacement at that transition. Without
/// a coefficient the threshold is constant over the clip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MssThreshold {
    pub base: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude_coeff: Option<f64>,
}

impl MssThreshold {
    pub fn constant(base: f64) -> Self {
        Self {
            base,
            amplitude_coeff: None,
        }
    }

    pub fn at(&self, amplitude: Option<f64>) -> f64 {
        match (self.amplitude_coeff, amplitude) {
            (Some(c), Some(a)) => self.base * (1.0 + c * a),
            _ => self.base,
        }
    }
}

/// Structural tolerances. `length` is a dimensionless ratio of the reference
/// length, `angle` is in radians. `per_component` entries keyed
/// `"<schema_id>/<component>"` (e.g. `human17/length:5-7`) take precedence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OisThresholds {
    pub length: f64,
    pub angle: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub per_component: BTreeMap<String, f64>,
}

impl OisThresholds {
    pub fn for_component(&self, schema_id: &str, component: &Component) -> f64 {
        let key = format!("{schema_id}/{component}");
        if let Some(&t) = self.per_component.get(&key) {
            return t;
        }
        self.for_kind(component.kind())
    }

    pub fn for_kind(&self, kind: ComponentKind) -> f64 {
        match kind {
            ComponentKind::Length => self.length,
            ComponentKind::Angle => self.angle,
        }
    }
}

/// Parameters of the legitimacy rules that excuse presence transitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TcsRules {
    /// Minimum fraction of the subject's box an occluder must cover.
    pub cover_fraction: f64,
    /// Edge margin as a fraction of the frame's smaller dimension.
    pub boundary_margin_fraction: f64,
    /// Number of visible frames inspected for monotone area change.
    pub depth_window: usize,
    /// Area bound (fraction of frame area) below which a shrinking object may vanish.
    pub min_area_fraction: f64,
}

impl Default for TcsRules {
    fn default() -> Self {
        Self {
            cover_fraction: 0.5,
            boundary_margin_fraction: 0.05,
            depth_window: 5,
            min_area_fraction: 0.002,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fallbacks {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mss: Option<MssThreshold>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pas: Option<f64>,
}

/// Why a calibrated value was not taken from its own scenario's samples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InsufficientEvidence {
    pub scenario: String,
    pub metric: String,
    pub samples: usize,
    pub resolution: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    #[serde(default)]
    pub reference_corpus: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantile: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_samples: Option<usize>,
    /// Sample counts keyed `"<metric>/<scenario>"`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sample_counts: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub insufficient: Vec<InsufficientEvidence>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overridden: Vec<String>,
}

/// Every tolerance used by the scorers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSet {
    pub mss: BTreeMap<String, MssThreshold>,
    pub ois: OisThresholds,
    /// Perceptual displacement threshold per scenario, pixels per frame.
    pub pas: BTreeMap<String, f64>,
    pub tcs_rules: TcsRules,
    #[serde(default)]
    pub fallback: Fallbacks,
    #[serde(default)]
    pub provenance: Provenance,
}

impl ThresholdSet {
    /// A set with only global fallbacks.
    pub fn uniform(mss: f64, length: f64, angle: f64, pas: f64) -> Self {
        Self {
            mss: BTreeMap::new(),
            ois: OisThresholds {
                length,
                angle,
                per_component: BTreeMap::new(),
            },
            pas: BTreeMap::new(),
            tcs_rules: TcsRules::default(),
            fallback: Fallbacks {
                mss: Some(MssThreshold::constant(mss)),
                pas: Some(pas),
            },
            provenance: Provenance::default(),
        }
    }

    pub fn mss_for(&self, scenario: &str) -> Result<MssThreshold, ThresholdError> {
        self.mss
            .get(scenario)
            .copied()
            .or(self.fallback.mss)
            .ok_or_else(|| ThresholdError::Missing {
                metric: "MSS",
                scenario: scenario.to_string(),
            })
    }

    pub fn pas_for(&self, scenario: &str) -> Result<f64, ThresholdError> {
        self.pas
            .get(scenario)
            .copied()
            .or(self.fallback.pas)
            .ok_or_else(|| ThresholdError::Missing {
                metric: "PAS",
                scenario: scenario.to_string(),
            })
    }

    /// Checks positivity of every threshold and the range of rule fractions.
    pub fn validate(&self) -> Result<(), ThresholdError> {
        let positive = |name: String, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ThresholdError::Invalid {
                    name,
                    reason: format!("must be positive, got {v}"),
                })
            }
        };
        let fraction = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(ThresholdError::Invalid {
                    name: name.to_string(),
                    reason: format!("must lie in (0,1), got {v}"),
                })
            }
        };
        let mss_ok = |name: String, t: &MssThreshold| {
            positive(name.clone(), t.base)?;
            if let Some(c) = t.amplitude_coeff {
                if !(c.is_finite() && c >= 0.0) {
                    return Err(ThresholdError::Invalid {
                        name,
                        reason: format!("amplitude_coeff must be non-negative, got {c}"),
                    });
                }
            }
            Ok(())
        };
        for (s, t) in &self.mss {
            mss_ok(format!("mss.{s}"), t)?;
        }
        if let Some(t) = &self.fallback.mss {
            mss_ok("fallback.mss".into(), t)?;
        }
        for (s, &t) in &self.pas {
            positive(format!("pas.{s}"), t)?;
        }
        if let Some(t) = self.fallback.pas {
            positive("fallback.pas".into(), t)?;
        }
        positive("ois.length".into(), self.ois.length)?;
        positive("ois.angle".into(), self.ois.angle)?;
        for (k, &t) in &self.ois.per_component {
            positive(format!("ois.per_component.{k}"), t)?;
        }
        fraction("tcs_rules.cover_fraction", self.tcs_rules.cover_fraction)?;
        fraction(
            "tcs_rules.boundary_margin_fraction",
            self.tcs_rules.boundary_margin_fraction,
        )?;
        fraction("tcs_rules.min_area_fraction", self.tcs_rules.min_area_fraction)?;
        if self.tcs_rules.depth_window < 2 {
            return Err(ThresholdError::Invalid {
                name: "tcs_rules.depth_window".into(),
                reason: "must be at least 2 frames".into(),
            });
        }
        Ok(())
    }
}

/// A partial [`ThresholdSet`]; every present field replaces the computed value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdOverrides {
    #[serde(default)]
    pub mss: BTreeMap<String, MssThreshold>,
    #[serde(default)]
    pub ois: OisOverrides,
    #[serde(default)]
    pub pas: BTreeMap<String, f64>,
    #[serde(default)]
    pub tcs_rules: TcsRuleOverrides,
    #[serde(default)]
    pub fallback: Fallbacks,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OisOverrides {
    pub length: Option<f64>,
    pub angle: Option<f64>,
    #[serde(default)]
    pub per_component: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TcsRuleOverrides {
    pub cover_fraction: Option<f64>,
    pub boundary_margin_fraction: Option<f64>,
    pub depth_window: Option<usize>,
    pub min_area_fraction: Option<f64>,
}

impl ThresholdOverrides {
    /// Applies every present field to `set`, recording the touched keys in provenance.
    pub fn apply(&self, set: &mut ThresholdSet) {
        let touched = &mut set.provenance.overridden;
        for (s, t) in &self.mss {
            set.mss.insert(s.clone(), *t);
            touched.push(format!("mss.{s}"));
        }
        for (s, t) in &self.pas {
            set.pas.insert(s.clone(), *t);
            touched.push(format!("pas.{s}"));
        }
        if let Some(v) = self.ois.length {
            set.ois.length = v;
            touched.push("ois.length".into());
        }
        if let Some(v) = self.ois.angle {
            set.ois.angle = v;
            touched.push("ois.angle".into());
        }
        for (k, t) in &self.ois.per_component {
            set.ois.per_component.insert(k.clone(), *t);
            touched.push(format!("ois.per_component.{k}"));
        }
        let r = &self.tcs_rules;
        if let Some(v) = r.cover_fraction {
            set.tcs_rules.cover_fraction = v;
            touched.push("tcs_rules.cover_fraction".into());
        }
        if let Some(v) = r.boundary_margin_fraction {
            set.tcs_rules.boundary_margin_fraction = v;
            touched.push("tcs_rules.boundary_margin_fraction".into());
        }
        if let Some(v) = r.depth_window {
            set.tcs_rules.depth_window = v;
            touched.push("tcs_rules.depth_window".into());
        }
        if let Some(v) = r.min_area_fraction {
            set.tcs_rules.min_area_fraction = v;
            touched.push("tcs_rules.min_area_fraction".into());
        }
        if let Some(t) = self.fallback.mss {
            set.fallback.mss = Some(t);
            touched.push("fallback.mss".into());
        }
        if let Some(t) = self.fallback.pas {
            set.fallback.pas = Some(t);
            touched.push("fallback.pas".into());
        }
    }
}
