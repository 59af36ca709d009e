use motionbench_core::bundle::{parse_bundle, serialize_bundle, BundleError, FeatureBundle};
use motionbench_core::metrics::{score_bundle_with, MosMapping};
use motionbench_core::synth;
use motionbench_core::thresholds::ThresholdSet;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

type Mutation = (&'static str, Box<dyn Fn(&mut Value)>);

fn random_bundle(seed: u64) -> FeatureBundle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    synth::random_small_bundle(&mut rng, &format!("v{seed}"))
}

proptest! {
    #[test]
    fn parse_inverts_serialize(seed in any::<u64>()) {
        let b = random_bundle(seed);
        let bytes = serialize_bundle(&b);
        let back = parse_bundle(&bytes).unwrap();
        prop_assert_eq!(&back, &b);
        prop_assert_eq!(serialize_bundle(&back), bytes);
    }
}

/// A valid document with one instance, one trajectory, one keypoint track and
/// class probabilities, as a JSON value to mutate.
fn document() -> Value {
    let mut b = synth::static_bundle("doc", "biological_motion/walking", 4);
    b.quality.q = vec![0.5, 0.6, 0.4, 0.5];
    serde_json::to_value(&b).unwrap()
}

fn classify(doc: &Value) -> Result<FeatureBundle, BundleError> {
    parse_bundle(&serde_json::to_vec(doc).unwrap())
}

#[test]
fn untouched_document_is_valid() {
    classify(&document()).unwrap();
}

#[test]
fn structural_violations_are_schema_errors() {
    let mutations: Vec<Mutation> = vec![
        ("version", Box::new(|d| d["schema_version"] = json!("vmbench-bundle/2"))),
        (
            "missing field",
            Box::new(|d| {
                d.as_object_mut().unwrap().remove("scene");
            }),
        ),
        ("unknown field", Box::new(|d| d["extra"] = json!(1))),
        (
            "short quality",
            Box::new(|d| {
                d["quality"]["q"].as_array_mut().unwrap().pop();
            }),
        ),
        (
            "frame count one",
            Box::new(|d| {
                d["frame_count"] = json!(1);
                d["quality"]["q"] = json!([0.5]);
            }),
        ),
        (
            "keypoint rows",
            Box::new(|d| {
                d["keypoint_tracks"][0]["positions"].as_array_mut().unwrap().pop();
            }),
        ),
        (
            "keypoint width",
            Box::new(|d| {
                d["keypoint_tracks"][0]["positions"][1].as_array_mut().unwrap().pop();
            }),
        ),
        (
            "visibility width",
            Box::new(|d| {
                d["keypoint_tracks"][0]["visibility"][2].as_array_mut().unwrap().pop();
            }),
        ),
        (
            "presence length",
            Box::new(|d| {
                d["instance_tracks"][0]["present"].as_array_mut().unwrap().pop();
            }),
        ),
        (
            "bbox on absent frame",
            Box::new(|d| {
                d["instance_tracks"][0]["present"][1] = json!(false);
            }),
        ),
        (
            "area missing on present frame",
            Box::new(|d| {
                d["instance_tracks"][0]["area"][2] = Value::Null;
            }),
        ),
        (
            "trajectory points",
            Box::new(|d| {
                d["trajectories"][0]["points"][0].as_array_mut().unwrap().pop();
            }),
        ),
        (
            "zero points",
            Box::new(|d| {
                let t = &mut d["trajectories"][0];
                t["points"] = json!([[], [], [], []]);
                t["visible"] = json!([[], [], [], []]);
            }),
        ),
        (
            "probability arity",
            Box::new(|d| d["class_probs"]["p"] = json!([0.5, 0.5])),
        ),
        (
            "unknown movement mode",
            Box::new(|d| d["scene"]["movement_mode"] = json!("teleport")),
        ),
        ("wrong type", Box::new(|d| d["fps"] = json!("fast"))),
    ];
    for (name, mutate) in mutations {
        let mut doc = document();
        mutate(&mut doc);
        let err = classify(&doc).expect_err(name);
        assert!(err.is_schema(), "{name}: {err}");
    }
}

#[test]
fn range_violations_are_value_errors() {
    let mutations: Vec<Mutation> = vec![
        (
            "probability sum",
            Box::new(|d| d["class_probs"]["p"] = json!([0.2, 0.2, 0.2, 0.2, 0.3])),
        ),
        (
            "negative probability",
            Box::new(|d| d["class_probs"]["p"] = json!([-0.1, 0.1, 0.5, 0.25, 0.25])),
        ),
        (
            "negative area",
            Box::new(|d| d["instance_tracks"][0]["area"][0] = json!(-4.0)),
        ),
        (
            "inverted bbox",
            Box::new(|d| d["instance_tracks"][0]["bbox"][0] = json!([10.0, 10.0, 5.0, 20.0])),
        ),
        ("quality above one", Box::new(|d| d["quality"]["q"][0] = json!(1.5))),
        ("zero fps", Box::new(|d| d["fps"] = json!(0.0))),
        ("zero width", Box::new(|d| d["width"] = json!(0))),
        ("empty video id", Box::new(|d| d["video_id"] = json!(""))),
        ("empty scenario", Box::new(|d| d["scene"]["scenario_id"] = json!(""))),
    ];
    for (name, mutate) in mutations {
        let mut doc = document();
        mutate(&mut doc);
        let err = classify(&doc).expect_err(name);
        assert!(err.is_value(), "{name}: {err}");
    }
}

#[test]
fn equal_bundles_serialize_byte_identically() {
    assert_eq!(serialize_bundle(&random_bundle(3)), serialize_bundle(&random_bundle(3)));
}

#[test]
fn corpus_reload_preserves_scores() {
    let thresholds = ThresholdSet::uniform(0.05, 0.2, 0.3, 3.0);
    let registry = synth::registry_with_probe();
    let mapping = MosMapping::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1050);
    let dir = tempfile::tempdir().unwrap();
    let mut before = Vec::new();
    for i in 0..1050 {
        let id = format!("v{i:04}");
        let b = if i % 2 == 0 {
            synth::random_small_bundle(&mut rng, &id)
        } else {
            synth::graded_bundle(
                &mut rng,
                &id,
                &format!("p{}", i / 6),
                "biological_motion/walking",
                (i % 7) as f64 / 6.0,
            )
        };
        std::fs::write(dir.path().join(format!("{id}.json")), serialize_bundle(&b)).unwrap();
        before.push(score_bundle_with(&b, &thresholds, &mapping, &registry));
    }
    for (i, expected) in before.iter().enumerate() {
        let bytes = std::fs::read(dir.path().join(format!("v{i:04}.json"))).unwrap();
        let b = parse_bundle(&bytes).unwrap();
        let after = score_bundle_with(&b, &thresholds, &mapping, &registry);
        assert_eq!(&after, expected);
    }
}
