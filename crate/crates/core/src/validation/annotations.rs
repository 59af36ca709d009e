//! Likert annotation records and their per-video aggregation.
//!
//! Annotation files hold one record per line,
//! `video_id,dimension,annotator_id,rating,package_id`, with `#` comment lines.

use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::ValidationError;
use crate::dimension::Dimension;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub video_id: String,
    pub dimension: Dimension,
    pub annotator_id: String,
    pub rating: u8,
    pub package_id: String,
}

impl AnnotationRecord {
    pub fn new(
        video_id: impl Into<String>,
        dimension: Dimension,
        annotator_id: impl Into<String>,
        rating: u8,
        package_id: impl Into<String>,
    ) -> Result<Self, ValidationError> {
        if !(1..=5).contains(&rating) {
            return Err(ValidationError::InvalidRating { rating: rating.into() });
        }
        Ok(Self {
            video_id: video_id.into(),
            dimension,
            annotator_id: annotator_id.into(),
            rating,
            package_id: package_id.into(),
        })
    }
}

/// Reads annotation lines. Blank lines and lines starting with `#` are skipped.
pub fn read_annotations<R: Read>(reader: R) -> Result<Vec<AnnotationRecord>, ValidationError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut out = Vec::new();
    for result in rdr.records() {
        let rec = result.map_err(|e| ValidationError::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            reason: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let parse_err = |reason: String| ValidationError::Parse { line, reason };
        if rec.len() != 5 {
            return Err(parse_err(format!("expected 5 fields, got {}", rec.len())));
        }
        let dimension: Dimension = rec[1]
            .parse()
            .map_err(|e: crate::dimension::UnknownDimension| parse_err(e.to_string()))?;
        let rating: i64 = rec[3]
            .parse()
            .map_err(|_| parse_err(format!("rating {:?} is not an integer", &rec[3])))?;
        if !(1..=5).contains(&rating) {
            return Err(ValidationError::InvalidRating { rating });
        }
        out.push(AnnotationRecord::new(
            &rec[0],
            dimension,
            &rec[2],
            rating as u8,
            &rec[4],
        )?);
    }
    Ok(out)
}

/// Writes records in the line format read by [`read_annotations`].
pub fn write_annotations(records: &[AnnotationRecord]) -> String {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for r in records {
        wtr.write_record([
            r.video_id.as_str(),
            r.dimension.as_str(),
            r.annotator_id.as_str(),
            &r.rating.to_string(),
            r.package_id.as_str(),
        ])
        .expect("writing to memory");
    }
    String::from_utf8(wtr.into_inner().expect("flush to memory")).expect("utf-8 input")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HumanScore {
    pub mean: f64,
    pub count: usize,
}

/// Mean Likert rating per (video, dimension).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HumanScoreTable {
    #[serde(with = "table_entries")]
    entries: BTreeMap<(String, Dimension), HumanScore>,
}

mod table_entries {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        video_id: String,
        dimension: Dimension,
        mean: f64,
        count: usize,
    }

    pub fn serialize<S: Serializer>(map: &BTreeMap<(String, Dimension), HumanScore>, s: S) -> Result<S::Ok, S::Error> {
        let entries: Vec<Entry> = map
            .iter()
            .map(|((v, d), h)| Entry {
                video_id: v.clone(),
                dimension: *d,
                mean: h.mean,
                count: h.count,
            })
            .collect();
        entries.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<(String, Dimension), HumanScore>, D::Error> {
        let entries = Vec::<Entry>::deserialize(d)?;
        Ok(entries
            .into_iter()
            .map(|e| {
                (
                    (e.video_id, e.dimension),
                    HumanScore {
                        mean: e.mean,
                        count: e.count,
                    },
                )
            })
            .collect())
    }
}

impl HumanScoreTable {
    /// Direct insertion, for synthetic studies and imports of pre-aggregated data.
    pub fn insert(&mut self, video_id: impl Into<String>, dimension: Dimension, mean: f64, count: usize) {
        self.entries
            .insert((video_id.into(), dimension), HumanScore { mean, count });
    }

    pub fn get(&self, video_id: &str, dimension: Dimension) -> Option<HumanScore> {
        self.entries.get(&(video_id.to_string(), dimension)).copied()
    }

    /// Unweighted mean of the five dimension means; `None` unless all five exist.
    pub fn aggregate(&self, video_id: &str) -> Option<f64> {
        let mut total = 0.0;
        for d in Dimension::ALL {
            total += self.get(video_id, d)?.mean;
        }
        Some(total / 5.0)
    }

    pub fn video_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.entries.keys().map(|(v, _)| v.clone()).collect();
        ids.dedup();
        ids
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Dimension, HumanScore)> {
        self.entries.iter().map(|((v, d), h)| (v.as_str(), *d, *h))
    }
}

/// Arithmetic mean per (video, dimension). Each annotator may rate a (video,
/// dimension) once, and a package holds exactly one dimension.
pub fn aggregate_annotations(records: &[AnnotationRecord]) -> Result<HumanScoreTable, ValidationError> {
    let mut package_dims: BTreeMap<&str, Dimension> = BTreeMap::new();
    let mut seen: BTreeMap<(&str, Dimension, &str), ()> = BTreeMap::new();
    let mut sums: BTreeMap<(String, Dimension), (u64, usize)> = BTreeMap::new();
    for r in records {
        if !(1..=5).contains(&r.rating) {
            return Err(ValidationError::InvalidRating {
                rating: r.rating.into(),
            });
        }
        match package_dims.get(r.package_id.as_str()) {
            Some(&d) if d != r.dimension => {
                return Err(ValidationError::MixedDimensionPackage {
                    package_id: r.package_id.clone(),
                    first: d,
                    second: r.dimension,
                })
            }
            Some(_) => {}
            None => {
                package_dims.insert(&r.package_id, r.dimension);
            }
        }
        if seen.insert((&r.video_id, r.dimension, &r.annotator_id), ()).is_some() {
            return Err(ValidationError::DuplicateRating {
                video_id: r.video_id.clone(),
                dimension: r.dimension,
                annotator_id: r.annotator_id.clone(),
            });
        }
        let e = sums.entry((r.video_id.clone(), r.dimension)).or_default();
        e.0 += u64::from(r.rating);
        e.1 += 1;
    }
    let entries = sums
        .into_iter()
        .map(|(k, (sum, n))| {
            (
                k,
                HumanScore {
                    mean: sum as f64 / n as f64,
                    count: n,
                },
            )
        })
        .collect();
    Ok(HumanScoreTable { entries })
}
