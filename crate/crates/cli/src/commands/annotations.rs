use std::path::Path;

use motionbench_core::validation::{aggregate_annotations, HumanScoreTable};
use serde::Serialize;

use super::validate::read_annotation_input;
use crate::output::Outputs;
use crate::CliError;

#[derive(Serialize)]
struct HumanScores {
    records: usize,
    videos: usize,
    scores: HumanScoreTable,
}

pub fn run(path: &Path, out: &Outputs) -> Result<(), CliError> {
    let records = read_annotation_input(path)?;
    let scores = aggregate_annotations(&records).map_err(|e| CliError::Corpus(e.to_string()))?;
    let doc = HumanScores {
        records: records.len(),
        videos: scores.video_ids().len(),
        scores,
    };
    println!("{} ratings over {} videos", doc.records, doc.videos);
    out.json("human_scores.json", &doc)
}
