//! Spearman rank correlation with average ranks for ties.

use super::ValidationError;
use crate::dimension::Dimension;

/// 1-based ranks; tied values share the mean of the ranks they span.
pub fn fractional_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    (sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0)
}

fn check(x: &[f64], name: &str) -> Result<(), ValidationError> {
    if let Some(v) = x.iter().find(|v| !v.is_finite()) {
        return Err(ValidationError::DegenerateInput(format!("{name} contains {v}")));
    }
    if x.iter().all(|&v| v == x[0]) {
        return Err(ValidationError::DegenerateInput(format!("{name} is constant")));
    }
    Ok(())
}

pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<f64, ValidationError> {
    if x.len() != y.len() {
        return Err(ValidationError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(ValidationError::TooFewSamples(x.len()));
    }
    check(x, "x")?;
    check(y, "y")?;
    Ok(pearson(&fractional_ranks(x), &fractional_ranks(y)))
}

/// Pairwise Spearman matrix of the five dimension columns, indexed by
/// [`Dimension::index`].
pub fn correlation_matrix(rows: &[[f64; 5]]) -> Result<[[f64; 5]; 5], ValidationError> {
    if rows.len() < 2 {
        return Err(ValidationError::TooFewSamples(rows.len()));
    }
    let columns: Vec<Vec<f64>> = (0..5).map(|d| rows.iter().map(|r| r[d]).collect()).collect();
    for (d, col) in Dimension::ALL.iter().zip(&columns) {
        check(col, d.as_str())?;
    }
    let ranks: Vec<Vec<f64>> = columns.iter().map(|c| fractional_ranks(c)).collect();
    let mut m = [[0.0; 5]; 5];
    for i in 0..5 {
        m[i][i] = 1.0;
        for j in i + 1..5 {
            let r = pearson(&ranks[i], &ranks[j]);
            m[i][j] = r;
            m[j][i] = r;
        }
    }
    Ok(m)
}

/// Dimension pairs whose correlation sign is quoted for human ratings:
/// OIS-MSS and OIS-CAS positive, PAS-OIS negative.
pub const QUOTED_SIGNS: [(Dimension, Dimension, f64); 3] = [
    (Dimension::Ois, Dimension::Mss, 1.0),
    (Dimension::Ois, Dimension::Cas, 1.0),
    (Dimension::Pas, Dimension::Ois, -1.0),
];

/// For each quoted pair, whether `matrix` has the quoted sign.
pub fn quoted_sign_agreement(matrix: &[[f64; 5]; 5]) -> Vec<(Dimension, Dimension, bool)> {
    QUOTED_SIGNS
        .iter()
        .map(|&(a, b, sign)| (a, b, matrix[a.index()][b.index()] * sign > 0.0))
        .collect()
}
