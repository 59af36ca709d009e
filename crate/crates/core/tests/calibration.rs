use motionbench_core::calibration::{calibrate, calibrate_with, empirical_quantile, CalibrationOptions};
use motionbench_core::synth;
use motionbench_core::thresholds::ThresholdOverrides;
use motionbench_core::FeatureBundle;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn planted_corpus(seed: u64, samples: usize) -> (Vec<FeatureBundle>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let drops: Vec<f64> = (0..samples).map(|_| rng.random_range(1e-9..1.0)).collect();
    let corpus = drops
        .chunks(50)
        .enumerate()
        .map(|(i, c)| synth::planted_drop_bundle(&format!("ref{i}"), "fluid_dynamics/waves", c))
        .collect();
    (corpus, drops)
}

#[test]
fn recovers_planted_uniform_quantile() {
    let (corpus, drops) = planted_corpus(99, 10_000);
    let set = calibrate(
        &corpus,
        0.99,
        &ThresholdOverrides::default(),
        &CalibrationOptions::default(),
    )
    .unwrap();
    let tau = set.mss_for("fluid_dynamics/waves").unwrap().base;
    assert!((tau - 0.99).abs() <= 0.02, "tau {tau}");
    assert_eq!(tau, empirical_quantile(&drops, 0.99).unwrap());
    // Unseen scenarios resolve to the corpus-wide value.
    assert_eq!(set.mss_for("weather_phenomena/rain").unwrap().base, tau);
}

#[test]
fn calibrated_reference_mostly_passes() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let corpus: Vec<FeatureBundle> = (0..60)
        .map(|i| synth::graded_bundle(&mut rng, &format!("r{i}"), "p", "biological_motion/walking", 0.1))
        .collect();
    let set = calibrate(
        &corpus,
        0.99,
        &ThresholdOverrides::default(),
        &CalibrationOptions::default(),
    )
    .unwrap();
    set.validate().unwrap();
    let mean_mss: f64 = corpus
        .iter()
        .map(|b| {
            motionbench_core::score_bundle(b, &set, &Default::default())
                .mss
                .unwrap()
        })
        .sum::<f64>()
        / corpus.len() as f64;
    assert!(mean_mss > 0.9, "{mean_mss}");
}

fn mixed_corpus(seed: u64) -> Vec<FeatureBundle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..40)
        .map(|i| {
            let id = format!("m{i}");
            if i % 2 == 0 {
                synth::random_small_bundle(&mut rng, &id)
            } else {
                let d = rng.random_range(0.0..1.0);
                synth::graded_bundle(&mut rng, &id, "p", "mechanical_motion/cars", d)
            }
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn idempotent(seed in any::<u64>(), q in 0.05f64..0.95) {
        let corpus = mixed_corpus(seed);
        let opts = CalibrationOptions { min_samples: 10, ..Default::default() };
        let reg = synth::registry_with_probe();
        let a = calibrate_with(&corpus, q, &ThresholdOverrides::default(), &opts, &reg).unwrap();
        let b = calibrate_with(&corpus, q, &ThresholdOverrides::default(), &opts, &reg).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn monotone_in_q(seed in any::<u64>(), q1 in 0.05f64..0.95, q2 in 0.05f64..0.95) {
        let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
        let corpus = mixed_corpus(seed);
        let opts = CalibrationOptions { min_samples: 10, ..Default::default() };
        let reg = synth::registry_with_probe();
        let a = calibrate_with(&corpus, lo, &ThresholdOverrides::default(), &opts, &reg).unwrap();
        let b = calibrate_with(&corpus, hi, &ThresholdOverrides::default(), &opts, &reg).unwrap();
        prop_assert!(a.ois.length <= b.ois.length);
        prop_assert!(a.ois.angle <= b.ois.angle);
        for scenario in a.mss.keys().chain(b.mss.keys()).chain(["unseen"].iter().map(|s| s.to_string()).collect::<Vec<_>>().iter()) {
            prop_assert!(a.mss_for(scenario).unwrap().base <= b.mss_for(scenario).unwrap().base);
            prop_assert!(a.pas_for(scenario).unwrap() <= b.pas_for(scenario).unwrap());
        }
    }

    #[test]
    fn quantile_within_sample_range(
        samples in prop::collection::vec(-1e3f64..1e3, 1..200),
        q in 0.001f64..0.999,
    ) {
        let v = empirical_quantile(&samples, q).unwrap();
        let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo <= v && v <= hi);
    }
}

#[test]
fn every_scenario_resolves() {
    let set = calibrate(
        &mixed_corpus(1),
        0.99,
        &ThresholdOverrides::default(),
        &CalibrationOptions::default(),
    )
    .unwrap();
    for s in ["", "anything", "mechanical_motion/cars", "fluid_dynamics/waves"] {
        assert!(set.mss_for(s).is_ok());
        assert!(set.pas_for(s).is_ok());
    }
    let json = serde_json::to_string(&set).unwrap();
    assert_eq!(
        serde_json::from_str::<motionbench_core::ThresholdSet>(&json).unwrap(),
        set
    );
}
