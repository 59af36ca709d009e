//! Skeleton schemas: which keypoint pairs form length components and which
//! triples form angle components.
//!
//! A human 17-keypoint layout and a quadruped 17-keypoint layout ship with the
//! crate; more schemas can be loaded from a JSON file with the same shape.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const BUILTIN: &str = include_str!("skeletons.json");

#[derive(Debug, Error)]
pub enum SkeletonError {
    #[error("skeleton {schema_id}: {reason}")]
    Invalid { schema_id: String, reason: String },
    #[error("skeleton file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("skeleton file: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkeletonSchema {
    pub schema_id: String,
    pub keypoint_names: Vec<String>,
    /// Keypoint index pairs whose Euclidean distance is tracked.
    pub length_components: Vec<[usize; 2]>,
    /// Keypoint index triples `(i, j, k)`; the angle is measured at `j`.
    pub angle_components: Vec<[usize; 3]>,
    /// Optional per-pair reference lengths in pixels, aligned with `length_components`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_lengths: Option<Vec<f64>>,
}

/// One anatomical component of a schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Component {
    Length([usize; 2]),
    Angle([usize; 3]),
}

impl Component {
    pub fn kind(&self) -> ComponentKind {
        match self {
            Component::Length(_) => ComponentKind::Length,
            Component::Angle(_) => ComponentKind::Angle,
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Length([i, j]) => write!(f, "length:{i}-{j}"),
            Component::Angle([i, j, k]) => write!(f, "angle:{i}-{j}-{k}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentKind {
    Length,
    Angle,
}

impl SkeletonSchema {
    pub fn keypoint_count(&self) -> usize {
        self.keypoint_names.len()
    }

    /// Length components first, then angle components.
    pub fn components(&self) -> Vec<Component> {
        self.length_components
            .iter()
            .copied()
            .map(Component::Length)
            .chain(self.angle_components.iter().copied().map(Component::Angle))
            .collect()
    }

    pub fn validate(&self) -> Result<(), SkeletonError> {
        let invalid = |reason: String| SkeletonError::Invalid {
            schema_id: self.schema_id.clone(),
            reason,
        };
        let n = self.keypoint_count();
        if self.schema_id.is_empty() {
            return Err(invalid("empty schema_id".into()));
        }
        let mut seen = BTreeSet::new();
        for c in self.components() {
            let indices: &[usize] = match &c {
                Component::Length(p) => p,
                Component::Angle(t) => t,
            };
            if let Some(bad) = indices.iter().find(|&&i| i >= n) {
                return Err(invalid(format!("{c} references keypoint {bad} >= {n}")));
            }
            let distinct: BTreeSet<_> = indices.iter().collect();
            if distinct.len() != indices.len() {
                return Err(invalid(format!("{c} repeats a keypoint")));
            }
            if !seen.insert(c) {
                return Err(invalid(format!("duplicate component {c}")));
            }
        }
        if let Some(refs) = &self.reference_lengths {
            if refs.len() != self.length_components.len() {
                return Err(invalid(format!(
                    "{} reference lengths for {} length components",
                    refs.len(),
                    self.length_components.len()
                )));
            }
            if refs.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
                return Err(invalid("reference lengths must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Schemas keyed by id.
#[derive(Debug, Clone, Default)]
pub struct SkeletonRegistry {
    schemas: BTreeMap<String, SkeletonSchema>,
}

impl SkeletonRegistry {
    /// The registry shipped with the crate (`human17`, `quadruped17`).
    pub fn builtin() -> Self {
        let schemas: Vec<SkeletonSchema> = serde_json::from_str(BUILTIN).expect("builtin skeletons are valid JSON");
        let mut reg = Self::default();
        for s in schemas {
            reg.insert(s).expect("builtin skeletons are valid");
        }
        reg
    }

    pub fn insert(&mut self, schema: SkeletonSchema) -> Result<(), SkeletonError> {
        schema.validate()?;
        self.schemas.insert(schema.schema_id.clone(), schema);
        Ok(())
    }

    /// Adds (or replaces) schemas from a JSON array file.
    pub fn extend_from_file(&mut self, path: &Path) -> Result<(), SkeletonError> {
        let text = std::fs::read_to_string(path)?;
        let schemas: Vec<SkeletonSchema> = serde_json::from_str(&text)?;
        for s in schemas {
            self.insert(s)?;
        }
        Ok(())
    }

    pub fn get(&self, schema_id: &str) -> Option<&SkeletonSchema> {
        self.schemas.get(schema_id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.schemas.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_registry_has_both_schemas() {
        let reg = SkeletonRegistry::builtin();
        let human = reg.get("human17").unwrap();
        assert_eq!(human.keypoint_count(), 17);
        assert_eq!(reg.get("quadruped17").unwrap().keypoint_count(), 17);
        assert_eq!(reg.ids().count(), 2);
        assert!(human.components().len() > 10);
    }

    #[test]
    fn out_of_range_index_rejected() {
        let s = SkeletonSchema {
            schema_id: "bad".into(),
            keypoint_names: vec!["a".into(), "b".into()],
            length_components: vec![[0, 2]],
            angle_components: vec![],
            reference_lengths: None,
        };
        assert!(s.validate().is_err());
    }

    #[test]
    fn duplicate_component_rejected() {
        let s = SkeletonSchema {
            schema_id: "dup".into(),
            keypoint_names: vec!["a".into(), "b".into()],
            length_components: vec![[0, 1], [0, 1]],
            angle_components: vec![],
            reference_lengths: None,
        };
        assert!(s.validate().is_err());
    }

    #[test]
    fn component_labels() {
        assert_eq!(Component::Length([5, 7]).to_string(), "length:5-7");
        assert_eq!(Component::Angle([5, 7, 9]).to_string(), "angle:5-7-9");
    }
}
