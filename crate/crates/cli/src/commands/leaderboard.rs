use std::collections::BTreeMap;

use motionbench_core::dimension::Dimension;
use motionbench_core::metrics::mean_present;
use motionbench_core::validation::tables::round1;
use serde::Serialize;

use super::subset;
use crate::args::LeaderboardArgs;
use crate::corpus::ScoreFile;
use crate::output::{read_json, Outputs};
use crate::CliError;

/// Label for videos whose corpus index gave no model name.
pub const UNATTRIBUTED: &str = "unattributed";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeaderboardRow {
    pub model: String,
    pub videos: usize,
    /// Mean of the selected dimension columns, ×100, one decimal.
    pub average: Option<f64>,
    /// Per-dimension mean score ×100, one decimal.
    pub scores: [Option<f64>; 5],
}

/// Per-model means ×100. The average is the mean of the selected column means.
pub fn leaderboard(scores: &ScoreFile, dims: &[Dimension]) -> Vec<LeaderboardRow> {
    let mut by_model: BTreeMap<&str, Vec<[Option<f64>; 5]>> = BTreeMap::new();
    for v in scores.videos.values() {
        by_model
            .entry(v.model_name.as_deref().unwrap_or(UNATTRIBUTED))
            .or_default()
            .push(v.report.scores());
    }
    by_model
        .into_iter()
        .map(|(model, rows)| {
            let columns: [Option<f64>; 5] =
                std::array::from_fn(|d| mean_present(&rows.iter().map(|r| r[d]).collect::<Vec<_>>()));
            let picked: Vec<Option<f64>> = dims.iter().map(|d| columns[d.index()]).collect();
            LeaderboardRow {
                model: model.to_string(),
                videos: rows.len(),
                average: mean_present(&picked).map(|v| round1(v * 100.0)),
                scores: columns.map(|c| c.map(|v| round1(v * 100.0))),
            }
        })
        .collect()
}

fn csv_text(rows: &[LeaderboardRow]) -> String {
    let cell = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.1}"));
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["model".to_string(), "Avg".to_string()];
    header.extend(Dimension::ALL.iter().map(|d| d.to_string()));
    header.push("videos".into());
    w.write_record(&header).expect("writing to memory");
    for r in rows {
        let mut line = vec![r.model.clone(), cell(r.average)];
        line.extend(r.scores.iter().map(|&v| cell(v)));
        line.push(r.videos.to_string());
        w.write_record(&line).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8")
}

pub fn run(a: &LeaderboardArgs, out: &Outputs) -> Result<(), CliError> {
    let scores: ScoreFile = read_json(&a.scores)?;
    let dims = match &a.subset {
        Some(s) => subset(s)?,
        None => Dimension::ALL.to_vec(),
    };
    if scores.videos.is_empty() {
        return Err(CliError::Corpus("score report holds no videos".into()));
    }
    let rows = leaderboard(&scores, &dims);
    for r in &rows {
        println!(
            "{:<24} {}",
            r.model,
            r.average.map_or("-".into(), |v| format!("{v:.1}"))
        );
    }
    out.json("leaderboard.json", &rows)?;
    out.text("leaderboard.csv", &csv_text(&rows))
}
