//! Improvement over baselines and delimited exports of correlation and
//! ablation tables (values as percentages with one decimal).

use serde::{Deserialize, Serialize};

use super::pairwise::AblationRow;
use super::ValidationError;
use crate::dimension::Dimension;

/// Rounds to one decimal place.
pub fn round1(v: f64) -> f64 {
    (v * 10.0).round() / 10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImprovementReport {
    pub ours: f64,
    pub best_baseline: String,
    pub best_value: f64,
    /// `ours - best_value`, in the same units, rounded to one decimal.
    pub delta: f64,
}

pub fn improvement_report(ours: f64, baselines: &[(String, f64)]) -> Result<ImprovementReport, ValidationError> {
    let (name, best) = baselines
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(ValidationError::NoBaselines)?;
    Ok(ImprovementReport {
        ours,
        best_baseline: name.clone(),
        best_value: *best,
        delta: round1(ours - best),
    })
}

/// One correlation row: ρ per dimension (fractions, not percentages).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub method: String,
    pub rho: [Option<f64>; 5],
}

impl CorrelationRow {
    /// Mean of the available per-dimension values.
    pub fn average(&self) -> Option<f64> {
        crate::metrics::mean_present(&self.rho)
    }
}

fn pct(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{:.1}", v * 100.0))
}

fn to_csv(header: Vec<String>, rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).expect("writing to memory");
    for r in rows {
        w.write_record(&r).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 input")
}

/// `method,Avg,CAS,MSS,OIS,PAS,TCS` with ρ×100.
pub fn correlation_table_csv(rows: &[CorrelationRow]) -> String {
    let mut header = vec!["method".to_string(), "Avg".to_string()];
    header.extend(Dimension::ALL.iter().map(|d| d.to_string()));
    let body = rows
        .iter()
        .map(|r| {
            let mut line = vec![r.method.clone(), pct(r.average())];
            line.extend(r.rho.iter().map(|&v| pct(v)));
            line
        })
        .collect();
    to_csv(header, body)
}

/// `CAS,MSS,OIS,PAS,TCS,accuracy` with 1/0 membership flags and accuracy×100.
pub fn ablation_table_csv(rows: &[AblationRow]) -> String {
    let mut header: Vec<String> = Dimension::ALL.iter().map(|d| d.to_string()).collect();
    header.push("accuracy".into());
    let body = rows
        .iter()
        .map(|r| {
            let mut line: Vec<String> = Dimension::ALL
                .iter()
                .map(|d| if r.subset.contains(d) { "1" } else { "0" }.to_string())
                .collect();
            line.push(pct(Some(r.accuracy)));
            line
        })
        .collect();
    to_csv(header, body)
}
