use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// One of the five motion-quality dimensions. Used both for metric outputs and for
/// human annotation packages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Dimension {
    /// Commonsense adherence.
    Cas,
    /// Motion smoothness.
    Mss,
    /// Object integrity.
    Ois,
    /// Perceptible amplitude.
    Pas,
    /// Temporal coherence.
    Tcs,
}

impl Dimension {
    /// Table column order.
    pub const ALL: [Dimension; 5] = [
        Dimension::Cas,
        Dimension::Mss,
        Dimension::Ois,
        Dimension::Pas,
        Dimension::Tcs,
    ];

    pub fn index(self) -> usize {
        match self {
            Dimension::Cas => 0,
            Dimension::Mss => 1,
            Dimension::Ois => 2,
            Dimension::Pas => 3,
            Dimension::Tcs => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Cas => "CAS",
            Dimension::Mss => "MSS",
            Dimension::Ois => "OIS",
            Dimension::Pas => "PAS",
            Dimension::Tcs => "TCS",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown dimension {0:?} (expected one of CAS, MSS, OIS, PAS, TCS)")]
pub struct UnknownDimension(pub String);

impl FromStr for Dimension {
    type Err = UnknownDimension;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "CAS" => Ok(Dimension::Cas),
            "MSS" => Ok(Dimension::Mss),
            "OIS" => Ok(Dimension::Ois),
            "PAS" => Ok(Dimension::Pas),
            "TCS" => Ok(Dimension::Tcs),
            _ => Err(UnknownDimension(s.to_string())),
        }
    }
}

/// Parses a comma-separated subset such as `CAS,MSS,OIS`. Duplicates are collapsed,
/// output is in canonical column order.
pub fn parse_subset(s: &str) -> Result<Vec<Dimension>, UnknownDimension> {
    let mut dims = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<Dimension>, _>>()?;
    dims.sort();
    dims.dedup();
    Ok(dims)
}
