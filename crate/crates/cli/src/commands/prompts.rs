use std::collections::BTreeMap;
use std::path::Path;

use motionbench_core::prompts::{
    admissible_count, apply_review, import_released_suite, read_records, run_pipeline, sample_metadata_sets,
    suite_statistics, write_records, FixedJudge, MetadataLibrary, MetadataSet, PromptRecord, TemplateGenerator,
};
use serde::{Deserialize, Serialize};

use crate::args::PromptsCommand;
use crate::output::{read_file, Outputs};
use crate::CliError;

#[derive(Serialize)]
struct SamplingInfo {
    seed: u64,
    requested: usize,
    admissible: usize,
}

#[derive(Serialize)]
struct PipelineSummary {
    total: usize,
    accept_threshold: f64,
    by_state: BTreeMap<String, usize>,
    rejections: BTreeMap<String, usize>,
}

#[derive(Deserialize)]
struct ReviewRow {
    prompt_id: String,
    accepted: bool,
}

fn load_records(path: &Path) -> Result<Vec<PromptRecord>, CliError> {
    read_records(read_file(path)?.as_slice()).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn records_text(records: &[PromptRecord]) -> String {
    let mut buf = Vec::new();
    write_records(&mut buf, records).expect("writing to memory");
    String::from_utf8(buf).expect("utf-8")
}

pub fn run(cmd: PromptsCommand, out: &Outputs) -> Result<(), CliError> {
    match cmd {
        PromptsCommand::Sample { library, n, seed } => {
            let lib = MetadataLibrary::from_json(&read_file(&library)?)
                .map_err(|e| CliError::Config(format!("{}: {e}", library.display())))?;
            let sets = sample_metadata_sets(&lib, n, seed).map_err(|e| CliError::Corpus(e.to_string()))?;
            let mut text = String::new();
            for s in &sets {
                text.push_str(&serde_json::to_string(s).expect("metadata set serializes"));
                text.push('\n');
            }
            println!(
                "sampled {} of {} admissible metadata sets (seed {seed})",
                sets.len(),
                admissible_count(&lib)
            );
            out.json(
                "sampling.json",
                &SamplingInfo {
                    seed,
                    requested: n,
                    admissible: admissible_count(&lib),
                },
            )?;
            out.text("metadata_sets.jsonl", &text)
        }
        PromptsCommand::Run {
            sets,
            template,
            judge_score,
            accept_threshold,
            id_prefix,
        } => {
            if !(0.0..=1.0).contains(&accept_threshold) {
                return Err(CliError::Config(format!(
                    "--accept-threshold must lie in [0,1], got {accept_threshold}"
                )));
            }
            let bytes = read_file(&sets)?;
            let text = String::from_utf8_lossy(&bytes);
            let parsed: Vec<MetadataSet> = text
                .lines()
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty())
                .map(|(i, l)| {
                    serde_json::from_str(l)
                        .map_err(|e| CliError::Config(format!("{} line {}: {e}", sets.display(), i + 1)))
                })
                .collect::<Result<_, _>>()?;
            let generator = template.map(TemplateGenerator::new).unwrap_or_default();
            let records = run_pipeline(
                &parsed,
                &generator,
                &FixedJudge(judge_score),
                accept_threshold,
                &id_prefix,
            );
            let mut summary = PipelineSummary {
                total: records.len(),
                accept_threshold,
                by_state: BTreeMap::new(),
                rejections: BTreeMap::new(),
            };
            for r in &records {
                *summary.by_state.entry(r.state.to_string()).or_default() += 1;
                if let Some(cause) = &r.rejection {
                    let key = serde_json::to_value(cause).expect("serializes")["cause"]
                        .as_str()
                        .unwrap_or_default()
                        .to_string();
                    *summary.rejections.entry(key).or_default() += 1;
                }
            }
            println!("pipeline: {:?}", summary.by_state);
            out.json("pipeline_summary.json", &summary)?;
            out.text("prompts.jsonl", &records_text(&records))
        }
        PromptsCommand::Stats { prompts, all } => {
            let records: Vec<PromptRecord> = load_records(&prompts)?
                .into_iter()
                .filter(|r| all || r.is_final_accepted())
                .collect();
            let stats = suite_statistics(&records).map_err(|e| CliError::Corpus(e.to_string()))?;
            println!("{} prompts, {} distinct subjects", stats.total, stats.distinct_subjects);
            out.json("suite_stats.json", &stats)
        }
        PromptsCommand::Import {
            suite,
            prompts,
            reviews,
        } => match (suite, prompts, reviews) {
            (Some(suite), None, None) => {
                let records = import_released_suite(read_file(&suite)?.as_slice())
                    .map_err(|e| CliError::Corpus(format!("{}: {e}", suite.display())))?;
                let accepted = records.iter().filter(|r| r.is_final_accepted()).count();
                println!(
                    "imported {} prompts, {accepted} within the word-count bound",
                    records.len()
                );
                out.text("prompts.jsonl", &records_text(&records))
            }
            (None, Some(prompts), Some(reviews)) => {
                let mut records = load_records(&prompts)?;
                let review_bytes = read_file(&reviews)?;
                let mut rdr = csv::Reader::from_reader(review_bytes.as_slice());
                let mut unknown = Vec::new();
                let mut applied = 0;
                for row in rdr.deserialize::<ReviewRow>() {
                    let row = row.map_err(|e| CliError::Config(format!("{}: {e}", reviews.display())))?;
                    if apply_review(&mut records, &row.prompt_id, row.accepted) {
                        applied += 1;
                    } else {
                        unknown.push(row.prompt_id);
                    }
                }
                if !unknown.is_empty() {
                    return Err(CliError::Corpus(format!(
                        "reviews name unknown prompts: {}",
                        unknown.join(", ")
                    )));
                }
                println!("applied {applied} review verdicts");
                out.text("prompts.jsonl", &records_text(&records))
            }
            _ => Err(CliError::Config(
                "use either --suite, or --prompts with --reviews".into(),
            )),
        },
    }
}
