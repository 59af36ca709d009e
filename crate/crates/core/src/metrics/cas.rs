//! Commonsense adherence: MOS-weighted expectation over the five class probabilities.

use super::{MetricError, MosMapping};
use crate::bundle::ClassProbabilities;

/// `Σ p_i · g_i`, clamped to `[0,1]` to absorb the simplex tolerance.
pub fn compute_cas(probs: &ClassProbabilities, mapping: &MosMapping) -> Result<f64, MetricError> {
    probs.validate().map_err(|e| MetricError::InvalidInput(e.to_string()))?;
    let score: f64 = probs.p.iter().zip(mapping.weights()).map(|(p, g)| p * g).sum();
    Ok(score.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cas(p: [f64; 5]) -> f64 {
        compute_cas(&ClassProbabilities { p }, &MosMapping::default()).unwrap()
    }

    #[test]
    fn one_hot_vectors_hit_the_mapping() {
        let expected = [0.0, 0.25, 0.5, 0.75, 1.0];
        for (i, want) in expected.into_iter().enumerate() {
            let mut p = [0.0; 5];
            p[i] = 1.0;
            assert_eq!(cas(p), want);
        }
    }

    #[test]
    fn symmetric_distribution_is_fair() {
        assert!((cas([0.1, 0.2, 0.4, 0.2, 0.1]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn invalid_probabilities_rejected() {
        let err = compute_cas(
            &ClassProbabilities {
                p: [0.3, 0.3, 0.3, 0.3, 0.3],
            },
            &MosMapping::default(),
        );
        assert!(matches!(err, Err(MetricError::InvalidInput(_))));
    }

    fn simplex() -> impl Strategy<Value = [f64; 5]> {
        prop::array::uniform5(0.0f64..1.0).prop_filter_map("non-zero mass", |w| {
            let s: f64 = w.iter().sum();
            (s > 1e-6).then(|| w.map(|x| x / s))
        })
    }

    proptest! {
        #[test]
        fn cas_in_unit_interval(p in simplex()) {
            let c = cas(p);
            prop_assert!((0.0..=1.0).contains(&c));
        }

        #[test]
        fn moving_mass_upward_never_decreases(p in simplex(), from in 0usize..4, gap in 1usize..5, frac in 0.0f64..=1.0) {
            let to = (from + gap).min(4);
            prop_assume!(to > from);
            let mut q = p;
            let moved = p[from] * frac;
            q[from] -= moved;
            q[to] += moved;
            prop_assert!(cas(q) >= cas(p) - 1e-12);
        }
    }
}
