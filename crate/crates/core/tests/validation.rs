use std::collections::BTreeMap;

use motionbench_core::dimension::Dimension;
use motionbench_core::metrics::MotionScoreReport;
use motionbench_core::validation::annotations::{read_annotations, write_annotations};
use motionbench_core::validation::labels::{labels_from_win_rates, PairOutcome, Winner};
use motionbench_core::validation::{
    ablation_sweep, aggregate_annotations, correlation_matrix, derive_commonsense_labels, pairwise_accuracy,
    spearman_rho, standard_ablation_subsets, AnnotationRecord, HumanScoreTable,
};
use proptest::prelude::*;

/// Sorts, assigns average ranks by scanning runs of equal values, then Pearson.
fn brute_force_spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        v.iter()
            .map(|&a| {
                let less = v.iter().filter(|&&b| b < a).count() as f64;
                let equal = v.iter().filter(|&&b| b == a).count() as f64;
                less + (equal + 1.0) / 2.0
            })
            .collect()
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

proptest! {
    #[test]
    fn spearman_matches_brute_force_with_ties(
        pairs in prop::collection::vec((0u8..6, 0u8..6), 2..40)
    ) {
        let x: Vec<f64> = pairs.iter().map(|p| f64::from(p.0)).collect();
        let y: Vec<f64> = pairs.iter().map(|p| f64::from(p.1)).collect();
        match spearman_rho(&x, &y) {
            Ok(rho) => prop_assert!((rho - brute_force_spearman(&x, &y)).abs() < 1e-12),
            Err(_) => prop_assert!(x.iter().all(|&v| v == x[0]) || y.iter().all(|&v| v == y[0])),
        }
    }

    #[test]
    fn matrix_invariant_under_row_permutation(
        rows in prop::collection::vec(prop::array::uniform5(0.0f64..1.0), 3..20),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut shuffled = rows.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let a = correlation_matrix(&rows).unwrap();
        let b = correlation_matrix(&shuffled).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                prop_assert!((a[i][j] - b[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn labels_monotone_in_win_rate(rates in prop::collection::vec(0.0f64..1.0, 1..60), bump in 0usize..60) {
        let mut map: BTreeMap<String, f64> = rates.iter().enumerate().map(|(i, &r)| (format!("v{i:02}"), r)).collect();
        let before = labels_from_win_rates(&map);
        let ids: Vec<String> = map.keys().cloned().collect();
        for a in &ids {
            for b in &ids {
                if map[a] < map[b] {
                    prop_assert!(before[a] <= before[b]);
                }
            }
        }
        let target = ids[bump % ids.len()].clone();
        *map.get_mut(&target).unwrap() += 0.5;
        let after = labels_from_win_rates(&map);
        prop_assert!(after[&target] >= before[&target]);
    }

    #[test]
    fn pairwise_accuracy_invariant_under_monotone_transform(
        values in prop::collection::vec((1u8..=5, 0.0f64..1.0), 12),
    ) {
        let (human, reports, grouping) = study(&values, |m| m);
        let (_, cubed, _) = study(&values, |m| m.powi(3));
        let a = pairwise_accuracy(&human, &reports, &grouping);
        let b = pairwise_accuracy(&human, &cubed, &grouping);
        prop_assert_eq!(a.map(|r| r.accuracy).ok(), b.map(|r| r.accuracy).ok());
    }
}

type Study = (
    HumanScoreTable,
    BTreeMap<String, MotionScoreReport>,
    BTreeMap<String, Vec<String>>,
);

/// Two prompts of six videos; every human dimension equals the rating and every
/// metric dimension equals `f(metric)`.
fn study(values: &[(u8, f64)], f: impl Fn(f64) -> f64) -> Study {
    let mut human = HumanScoreTable::default();
    let mut reports = BTreeMap::new();
    let mut grouping: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (i, &(rating, metric)) in values.iter().enumerate() {
        let id = format!("v{i:02}");
        for d in Dimension::ALL {
            human.insert(&id, d, f64::from(rating), 3);
        }
        reports.insert(id.clone(), MotionScoreReport::from_scores(&id, [Some(f(metric)); 5]));
        grouping.entry(format!("p{}", i / 6)).or_default().push(id);
    }
    (human, reports, grouping)
}

#[test]
fn annotation_file_to_pairwise_accuracy() {
    let mut records = Vec::new();
    for (v, base) in [("a", 1u8), ("b", 3), ("c", 5)] {
        for d in Dimension::ALL {
            for (k, annotator) in ["x", "y", "z"].iter().enumerate() {
                let rating = (base + k as u8 % 2).min(5);
                records.push(AnnotationRecord::new(v, d, *annotator, rating, format!("pkg-{d}")).unwrap());
            }
        }
    }
    let text = write_annotations(&records);
    let table = aggregate_annotations(&read_annotations(text.as_bytes()).unwrap()).unwrap();
    assert_eq!(table.len(), 15);
    assert!((table.get("a", Dimension::Cas).unwrap().mean - 4.0 / 3.0).abs() < 1e-15);

    let reports: BTreeMap<String, MotionScoreReport> = [("a", 0.1), ("b", 0.5), ("c", 0.4)]
        .iter()
        .map(|&(v, s)| (v.to_string(), MotionScoreReport::from_scores(v, [Some(s); 5])))
        .collect();
    let grouping = BTreeMap::from([("p".to_string(), vec!["a".into(), "b".into(), "c".into()])]);
    let r = pairwise_accuracy(&table, &reports, &grouping).unwrap();
    assert_eq!((r.decided, r.matches), (3, 2));

    let rows = ablation_sweep(&table, &reports, &grouping, &standard_ablation_subsets()).unwrap();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|row| (row.accuracy - 2.0 / 3.0).abs() < 1e-15));
}

#[test]
fn round_robin_labels() {
    let mut outcomes = Vec::new();
    for i in 0..23 {
        for j in i + 1..23 {
            outcomes.push(PairOutcome::new(format!("v{i:02}"), format!("v{j:02}"), Winner::A));
        }
    }
    let labels = derive_commonsense_labels(&outcomes).unwrap();
    let mut sizes = [0usize; 5];
    for l in labels.values() {
        sizes[*l as usize - 1] += 1;
    }
    assert_eq!(sizes, [5, 5, 5, 4, 4]);
    // v00 beats everyone.
    assert_eq!(labels["v00"], 5);
    assert_eq!(labels["v22"], 1);
}
