use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use motionbench_core::dimension::Dimension;
use motionbench_core::validation::annotations::{read_annotations, AnnotationRecord};
use motionbench_core::validation::pairwise::{human_aggregates, metric_aggregates, pairwise_from_aggregates};
use motionbench_core::validation::spearman::quoted_sign_agreement;
use motionbench_core::validation::tables::{ablation_table_csv, correlation_table_csv, CorrelationRow};
use motionbench_core::validation::{
    aggregate_annotations, correlation_matrix, spearman_rho, standard_ablation_subsets, AblationRow, HumanScoreTable,
    PreferencePair,
};
use serde::Serialize;

use super::subset;
use crate::args::ValidateArgs;
use crate::corpus::ScoreFile;
use crate::output::{read_file, read_json, Outputs};
use crate::CliError;

/// Name of the method row in the correlation table export.
const METHOD: &str = "motionbench";

#[derive(Debug, Serialize)]
pub struct DimensionCorrelation {
    pub dimension: Dimension,
    pub videos: usize,
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct PairwiseSummary {
    pub accuracy: Option<f64>,
    pub candidates: usize,
    pub decided: usize,
    pub matches: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct MatrixReport {
    pub videos: usize,
    pub human: Option<[[f64; 5]; 5]>,
    pub metric: Option<[[f64; 5]; 5]>,
    /// Sign of OIS-MSS, OIS-CAS (positive) and PAS-OIS (negative) on each side.
    pub human_quoted_signs: Vec<(Dimension, Dimension, bool)>,
    pub metric_quoted_signs: Vec<(Dimension, Dimension, bool)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct ValidationReport {
    pub annotated_videos: usize,
    pub spearman: Vec<DimensionCorrelation>,
    pub average_rho: Option<f64>,
    pub pairwise: PairwiseSummary,
    pub ablation: Vec<AblationRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ablation_errors: Vec<String>,
    pub correlation_matrices: MatrixReport,
}

pub fn read_annotation_input(path: &Path) -> Result<Vec<AnnotationRecord>, CliError> {
    let files: Vec<PathBuf> = if path.is_dir() {
        let mut v: Vec<PathBuf> = fs::read_dir(path)
            .map_err(|e| CliError::Config(format!("cannot list {}: {e}", path.display())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "csv"))
            .collect();
        v.sort();
        v
    } else {
        vec![path.to_path_buf()]
    };
    let mut records = Vec::new();
    for f in files {
        let bytes = read_file(&f)?;
        records
            .extend(read_annotations(bytes.as_slice()).map_err(|e| CliError::Corpus(format!("{}: {e}", f.display())))?);
    }
    if records.is_empty() {
        return Err(CliError::Corpus(format!("no annotation records in {}", path.display())));
    }
    Ok(records)
}

fn join(scores: &ScoreFile, human: &HumanScoreTable) -> Result<(), CliError> {
    let unmatched: Vec<String> = human
        .video_ids()
        .into_iter()
        .filter(|id| !scores.videos.contains_key(id))
        .collect();
    if unmatched.is_empty() {
        Ok(())
    } else {
        Err(CliError::Join(unmatched))
    }
}

/// prompt_id -> annotated videos with a complete human aggregate and a metric score.
fn grouping(scores: &ScoreFile, human: &HumanScoreTable) -> BTreeMap<String, Vec<String>> {
    let mut g: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (id, v) in &scores.videos {
        if human.aggregate(id).is_some() && v.report.average.is_some() {
            g.entry(v.prompt_id.clone()).or_default().push(id.clone());
        }
    }
    g.retain(|_, videos| videos.len() >= 2);
    g
}

fn spearman_per_dimension(scores: &ScoreFile, human: &HumanScoreTable) -> Vec<DimensionCorrelation> {
    Dimension::ALL
        .iter()
        .map(|&d| {
            let (h, m): (Vec<f64>, Vec<f64>) = scores
                .videos
                .iter()
                .filter_map(|(id, v)| Some((human.get(id, d)?.mean, v.report.score(d)?)))
                .unzip();
            let (rho, error) = match spearman_rho(&m, &h) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            DimensionCorrelation {
                dimension: d,
                videos: h.len(),
                rho,
                error,
            }
        })
        .collect()
}

fn matrices(scores: &ScoreFile, human: &HumanScoreTable) -> MatrixReport {
    let mut human_rows = Vec::new();
    let mut metric_rows = Vec::new();
    for (id, v) in &scores.videos {
        let h: Option<Vec<f64>> = Dimension::ALL
            .iter()
            .map(|&d| human.get(id, d).map(|s| s.mean))
            .collect();
        let m: Option<Vec<f64>> = v.report.scores().into_iter().collect();
        if let (Some(h), Some(m)) = (h, m) {
            human_rows.push([h[0], h[1], h[2], h[3], h[4]]);
            metric_rows.push([m[0], m[1], m[2], m[3], m[4]]);
        }
    }
    let mut errors = Vec::new();
    let mut side = |name: &str, rows: &[[f64; 5]]| match correlation_matrix(rows) {
        Ok(m) => Some(m),
        Err(e) => {
            errors.push(format!("{name}: {e}"));
            None
        }
    };
    let human_m = side("human", &human_rows);
    let metric_m = side("metric", &metric_rows);
    MatrixReport {
        videos: human_rows.len(),
        human_quoted_signs: human_m.as_ref().map(quoted_sign_agreement).unwrap_or_default(),
        metric_quoted_signs: metric_m.as_ref().map(quoted_sign_agreement).unwrap_or_default(),
        human: human_m,
        metric: metric_m,
        errors,
    }
}

fn ablation(
    scores: &ScoreFile,
    human_agg: &BTreeMap<String, f64>,
    groups: &BTreeMap<String, Vec<String>>,
    subsets: &[Vec<Dimension>],
) -> (Vec<AblationRow>, Vec<String>) {
    let reports = scores.reports();
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for s in subsets {
        let result =
            metric_aggregates(&reports, groups, s).and_then(|m| pairwise_from_aggregates(human_agg, &m, groups));
        match result {
            Ok(r) => rows.push(AblationRow {
                subset: s.clone(),
                accuracy: r.accuracy,
                decided: r.decided,
            }),
            Err(e) => errors.push(format!("{}: {e}", names(s))),
        }
    }
    (rows, errors)
}

fn names(dims: &[Dimension]) -> String {
    dims.iter().map(|d| d.as_str()).collect::<Vec<_>>().join("+")
}

pub fn run(a: &ValidateArgs, out: &Outputs, ablation_only: bool) -> Result<(), CliError> {
    let scores: ScoreFile = read_json(&a.scores)?;
    let subsets = if a.subsets.is_empty() {
        standard_ablation_subsets()
    } else {
        a.subsets.iter().map(|s| subset(s)).collect::<Result<_, _>>()?
    };
    let records = read_annotation_input(&a.annotations)?;
    let human = aggregate_annotations(&records).map_err(|e| CliError::Corpus(e.to_string()))?;
    join(&scores, &human)?;

    let groups = grouping(&scores, &human);
    let human_agg = human_aggregates(&human, &groups).map_err(|e| CliError::Corpus(e.to_string()))?;
    let (rows, ablation_errors) = ablation(&scores, &human_agg, &groups, &subsets);
    for e in &ablation_errors {
        eprintln!("ablation: {e}");
    }
    if ablation_only {
        println!("ablation over {} subsets, {} prompts", rows.len(), groups.len());
        out.json("ablation.json", &rows)?;
        return out.text("ablation_table.csv", &ablation_table_csv(&rows));
    }

    let metric_agg =
        metric_aggregates(&scores.reports(), &groups, &Dimension::ALL).map_err(|e| CliError::Corpus(e.to_string()))?;
    let (pairwise, pairs): (PairwiseSummary, Vec<PreferencePair>) =
        match pairwise_from_aggregates(&human_agg, &metric_agg, &groups) {
            Ok(r) => (
                PairwiseSummary {
                    accuracy: Some(r.accuracy),
                    candidates: r.candidates,
                    decided: r.decided,
                    matches: r.matches,
                    error: None,
                },
                r.pairs,
            ),
            Err(e) => (
                PairwiseSummary {
                    accuracy: None,
                    candidates: 0,
                    decided: 0,
                    matches: 0,
                    error: Some(e.to_string()),
                },
                Vec::new(),
            ),
        };
    let spearman = spearman_per_dimension(&scores, &human);
    let rho: [Option<f64>; 5] = std::array::from_fn(|i| spearman[i].rho);
    let row = CorrelationRow {
        method: METHOD.into(),
        rho,
    };
    let annotated: BTreeSet<String> = human.video_ids().into_iter().collect();
    let report = ValidationReport {
        annotated_videos: annotated.len(),
        average_rho: row.average(),
        spearman,
        pairwise,
        ablation: rows,
        ablation_errors,
        correlation_matrices: matrices(&scores, &human),
    };
    println!(
        "validated {} annotated videos: average rho {}, pairwise accuracy {}",
        report.annotated_videos,
        report.average_rho.map_or("n/a".into(), |v| format!("{v:.3}")),
        report.pairwise.accuracy.map_or("n/a".into(), |v| format!("{v:.3}")),
    );
    out.json("validation.json", &report)?;
    out.json("pairs.json", &pairs)?;
    out.text("correlation_table.csv", &correlation_table_csv(&[row]))?;
    out.text("ablation_table.csv", &ablation_table_csv(&report.ablation))
}
