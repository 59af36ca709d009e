use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use motionbench_core::metrics::{score_bundle_with, MosMapping};
use motionbench_core::ThresholdSet;
use rayon::prelude::*;

use super::calibrate::registry;
use crate::args::ScoreArgs;
use crate::corpus::{self, ScoreFile, ScoredVideo};
use crate::output::{read_json, Outputs};
use crate::CliError;

pub fn run(a: &ScoreArgs, out: &Outputs) -> Result<(), CliError> {
    let thresholds: ThresholdSet = read_json(&a.thresholds)?;
    thresholds
        .validate()
        .map_err(|e| CliError::Config(format!("{}: {e}", a.thresholds.display())))?;
    let reg = registry(a.skeletons.as_deref())?;
    let loaded = corpus::load_dir(&a.bundles)?;
    let mapping = MosMapping::default();

    let scored: Vec<_> = loaded
        .par_iter()
        .map(|(entry, result)| {
            result.as_ref().map(|b| {
                let report = score_bundle_with(b, &thresholds, &mapping, &reg);
                (
                    b.video_id.clone(),
                    entry.prompt_id.clone().unwrap_or_else(|| b.prompt_id.clone()),
                    report,
                )
            })
        })
        .collect();

    let mut file = ScoreFile::default();
    for ((entry, _), result) in loaded.iter().zip(scored) {
        match result {
            Ok((video_id, prompt_id, report)) => {
                if entry.from_index && video_id != entry.video_id {
                    file.failures.insert(
                        entry.video_id.clone(),
                        format!("index names {} but the bundle holds {video_id}", entry.video_id),
                    );
                } else if let Entry::Vacant(slot) = file.videos.entry(video_id.clone()) {
                    slot.insert(ScoredVideo {
                        prompt_id,
                        model_name: entry.model_name.clone(),
                        report,
                    });
                } else {
                    file.failures.insert(
                        entry.path.display().to_string(),
                        format!("duplicate video_id {video_id}"),
                    );
                }
            }
            Err(e) => {
                file.failures.insert(entry.video_id.clone(), e.clone());
            }
        }
    }
    if file.videos.is_empty() {
        return Err(CliError::Corpus(format!(
            "none of the {} bundles could be scored",
            file.failures.len()
        )));
    }
    let absent: BTreeMap<String, usize> = file.videos.values().fold(BTreeMap::new(), |mut acc, v| {
        for d in v.report.diagnostics.absent.keys() {
            *acc.entry(d.to_string()).or_default() += 1;
        }
        acc
    });
    println!(
        "scored {} videos, {} failures, absent scores {:?}",
        file.videos.len(),
        file.failures.len(),
        absent
    );
    out.json("scores.json", &file)
}
