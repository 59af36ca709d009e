//! Subjects, places and actions that prompts are composed from.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::PromptError;
use crate::bundle::MovementMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubjectCategory {
    Human,
    Animal,
    Object,
}

impl SubjectCategory {
    pub const ALL: [SubjectCategory; 3] = [Self::Human, Self::Animal, Self::Object];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Human => "human",
            Self::Animal => "animal",
            Self::Object => "object",
        }
    }
}

impl fmt::Display for SubjectCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How many entities the subject denotes: one, two, or a group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EntityCount {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "n")]
    Many,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Subject {
    pub name: String,
    pub category: SubjectCategory,
    pub entity_count: EntityCount,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Place {
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Action {
    pub name: String,
    /// Subject categories that can perform the action.
    pub categories: Vec<SubjectCategory>,
    pub movement_mode: MovementMode,
}

impl Action {
    pub fn applies_to(&self, subject: &Subject) -> bool {
        self.categories.contains(&subject.category)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetadataLibrary {
    pub subjects: Vec<Subject>,
    pub places: Vec<Place>,
    pub actions: Vec<Action>,
}

fn check_names<'a>(kind: &str, names: impl Iterator<Item = &'a str>) -> Result<(), PromptError> {
    let mut seen = BTreeSet::new();
    for name in names {
        if name.trim().is_empty() {
            return Err(PromptError::Library(format!("empty {kind} name")));
        }
        if !seen.insert(name) {
            return Err(PromptError::Library(format!("duplicate {kind} {name:?}")));
        }
    }
    if seen.is_empty() {
        return Err(PromptError::Library(format!("no {kind}s")));
    }
    Ok(())
}

impl MetadataLibrary {
    pub fn validate(&self) -> Result<(), PromptError> {
        check_names("subject", self.subjects.iter().map(|s| s.name.as_str()))?;
        check_names("place", self.places.iter().map(|p| p.name.as_str()))?;
        check_names("action", self.actions.iter().map(|a| a.name.as_str()))?;
        if let Some(a) = self.actions.iter().find(|a| a.categories.is_empty()) {
            return Err(PromptError::Library(format!(
                "action {:?} applies to no subject category",
                a.name
            )));
        }
        Ok(())
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, PromptError> {
        let lib: Self = serde_json::from_slice(bytes)?;
        lib.validate()?;
        Ok(lib)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("library serializes") + "\n"
    }
}
