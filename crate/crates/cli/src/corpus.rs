//! Bundle directories and score report files.
//!
//! A corpus directory holds bundle files and optionally an `index.csv` with
//! header `video_id,path,prompt_id,model_name` (paths relative to the
//! directory). Without an index every `*.json` file is a bundle and model
//! names are unknown.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use motionbench_core::metrics::MotionScoreReport;
use motionbench_core::{parse_bundle, FeatureBundle};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const INDEX_FILE: &str = "index.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub video_id: String,
    pub path: PathBuf,
    #[serde(default)]
    pub prompt_id: Option<String>,
    #[serde(default)]
    pub model_name: Option<String>,
    /// Whether the entry came from an index file, whose video_id must match the bundle's.
    #[serde(skip)]
    pub from_index: bool,
}

pub fn discover(dir: &Path) -> Result<Vec<CorpusEntry>, CliError> {
    if !dir.is_dir() {
        return Err(CliError::Config(format!("{} is not a directory", dir.display())));
    }
    let index = dir.join(INDEX_FILE);
    if index.is_file() {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(&index)
            .map_err(|e| CliError::Config(format!("{}: {e}", index.display())))?;
        let mut entries = Vec::new();
        for row in rdr.deserialize::<CorpusEntry>() {
            let mut e = row.map_err(|e| CliError::Config(format!("{}: {e}", index.display())))?;
            e.path = dir.join(&e.path);
            e.from_index = true;
            e.prompt_id = e.prompt_id.filter(|s| !s.is_empty());
            e.model_name = e.model_name.filter(|s| !s.is_empty());
            entries.push(e);
        }
        entries.sort_by(|a, b| a.video_id.cmp(&b.video_id));
        return Ok(entries);
    }
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::Config(format!("cannot list {}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    Ok(paths
        .into_iter()
        .map(|path| CorpusEntry {
            video_id: path.file_stem().unwrap_or_default().to_string_lossy().into_owned(),
            path,
            prompt_id: None,
            model_name: None,
            from_index: false,
        })
        .collect())
}

/// Reads and parses every entry in parallel. Results keep the entry order.
pub fn load(entries: &[CorpusEntry]) -> Vec<Result<FeatureBundle, String>> {
    entries
        .par_iter()
        .map(|e| {
            let bytes = fs::read(&e.path).map_err(|err| format!("{}: {err}", e.path.display()))?;
            parse_bundle(&bytes).map_err(|err| err.to_string())
        })
        .collect()
}

/// A corpus entry with its parse result.
pub type LoadedEntry = (CorpusEntry, Result<FeatureBundle, String>);

/// Loads a directory and fails when it holds no bundle at all.
pub fn load_dir(dir: &Path) -> Result<Vec<LoadedEntry>, CliError> {
    let entries = discover(dir)?;
    if entries.is_empty() {
        return Err(CliError::Corpus(format!("no bundles found in {}", dir.display())));
    }
    let loaded = load(&entries);
    Ok(entries.into_iter().zip(loaded).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredVideo {
    pub prompt_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_name: Option<String>,
    pub report: MotionScoreReport,
}

/// Output of `score`: one entry per scored video plus the files that could not be scored.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreFile {
    pub videos: BTreeMap<String, ScoredVideo>,
    #[serde(default)]
    pub failures: BTreeMap<String, String>,
}

impl ScoreFile {
    pub fn reports(&self) -> BTreeMap<String, MotionScoreReport> {
        self.videos.iter().map(|(k, v)| (k.clone(), v.report.clone())).collect()
    }
}
