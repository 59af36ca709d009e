//! Regenerates the synthetic fixtures under `crates/cli/fixtures` (or the directory
//! given as the first argument). Output is fully determined by the fixed seed.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use motionbench_core::bundle::MovementMode;
use motionbench_core::calibration::{calibrate, CalibrationOptions};
use motionbench_core::dimension::Dimension;
use motionbench_core::prompts::{Action, EntityCount, MetadataLibrary, Place, Subject, SubjectCategory};
use motionbench_core::serialize_bundle;
use motionbench_core::synth::graded_bundle;
use motionbench_core::thresholds::ThresholdOverrides;
use motionbench_core::validation::annotations::{write_annotations, AnnotationRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20250317;
const MODELS: [(&str, f64); 6] = [
    ("model-a", 0.15),
    ("model-b", 0.3),
    ("model-c", 0.45),
    ("model-d", 0.6),
    ("model-e", 0.75),
    ("model-f", 0.9),
];
const PROMPTS: usize = 5;
const SCENARIOS: [&str; 2] = ["biological_motion/walking", "biological_motion/dancing"];

fn write(path: &Path, bytes: impl AsRef<[u8]>) {
    fs::create_dir_all(path.parent().unwrap()).unwrap();
    fs::write(path, bytes).unwrap();
}

fn library() -> MetadataLibrary {
    use SubjectCategory::*;
    let subject = |name: &str, category, entity_count| Subject {
        name: name.into(),
        category,
        entity_count,
    };
    let place = |name: &str| Place { name: name.into() };
    let action = |name: &str, categories: &[SubjectCategory], mode| Action {
        name: name.into(),
        categories: categories.to_vec(),
        movement_mode: mode,
    };
    MetadataLibrary {
        subjects: vec![
            subject("a young dancer", Human, EntityCount::One),
            subject("two cyclists", Human, EntityCount::Two),
            subject("a flock of pigeons", Animal, EntityCount::Many),
            subject("a golden retriever", Animal, EntityCount::One),
            subject("a paper lantern", Object, EntityCount::One),
            subject("a freight train", Object, EntityCount::One),
        ],
        places: vec![
            place("a crowded plaza"),
            place("a snowy mountain pass"),
            place("a quiet harbor at dusk"),
            place("an abandoned warehouse"),
            place("a sunflower field"),
        ],
        actions: vec![
            action("spins on one foot", &[Human], MovementMode::BiologicalMotion),
            action(
                "races downhill",
                &[Human, Animal, Object],
                MovementMode::MechanicalMotion,
            ),
            action("scatters into the air", &[Animal], MovementMode::CollectiveBehavior),
            action("drifts on the wind", &[Object], MovementMode::WeatherPhenomena),
            action(
                "splashes through puddles",
                &[Human, Animal],
                MovementMode::FluidDynamics,
            ),
            action(
                "collides with a stack of crates",
                &[Object, Human],
                MovementMode::EnergyTransfer,
            ),
            action("leaps over a fence", &[Human, Animal], MovementMode::BiologicalMotion),
            action("circles slowly", &[Animal, Object], MovementMode::CollectiveBehavior),
        ],
    }
}

const RELEASED: [(&str, &str, &str, &str, &str); 6] = [
    ("a dolphin", "a turquoise lagoon", "breaches the surface", "biological motion",
     "A sleek dolphin breaches the surface of a turquoise lagoon, arcing through the air before slicing back into the water with a bright splash."),
    ("a windmill", "a green hillside", "turns steadily", "mechanical motion",
     "An old wooden windmill on a green hillside turns steadily in the breeze, its four sails sweeping past the camera in a slow rhythm."),
    ("a storm cloud", "an open prairie", "rolls forward", "weather phenomena",
     "A towering storm cloud rolls forward over an open prairie, lightning flickering inside it as rain sheets sweep across the tall grass."),
    ("a school of sardines", "a kelp forest", "swirls", "collective behavior",
     "A dense school of sardines swirls through a kelp forest, the silver bodies turning together as a single shimmering shape."),
    ("a waterfall", "a mossy canyon", "pours", "fluid dynamics",
     "A narrow waterfall pours into a mossy canyon pool, white foam spreading outward while mist drifts up past the wet rocks."),
    ("a bowling ball", "a polished lane", "strikes the pins", "energy transfer",
     "Bowling ball strikes pins."),
];

fn main() {
    let root: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"));
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    let mut reference = Vec::new();
    for i in 0..40 {
        let scenario = SCENARIOS[0];
        let defect = rng.random_range(0.0..0.1);
        let b = graded_bundle(&mut rng, &format!("ref-{i:03}"), "reference", scenario, defect);
        write(&root.join(format!("reference/ref-{i:03}.json")), serialize_bundle(&b));
        reference.push(b);
    }
    let opts = CalibrationOptions {
        corpus_id: "reference".into(),
        ..Default::default()
    };
    let thresholds = calibrate(&reference, 0.99, &ThresholdOverrides::default(), &opts).unwrap();
    write(
        &root.join("thresholds.json"),
        serde_json::to_string_pretty(&thresholds).unwrap() + "\n",
    );

    let mut index = String::from("video_id,path,prompt_id,model_name\n");
    let mut records = Vec::new();
    for p in 0..PROMPTS {
        let prompt_id = format!("prompt-{p:02}");
        let scenario = SCENARIOS[p % SCENARIOS.len()];
        for (model, base) in MODELS {
            let video_id = format!("{model}-{p:02}");
            let defect = (base + rng.random_range(-0.12..0.12)).clamp(0.0, 1.0);
            let b = graded_bundle(&mut rng, &video_id, &prompt_id, scenario, defect);
            let file = format!("{video_id}.json");
            write(&root.join("corpus").join(&file), serialize_bundle(&b));
            writeln!(index, "{video_id},{file},{prompt_id},{model}").unwrap();
            for d in Dimension::ALL {
                for annotator in ["ann-1", "ann-2", "ann-3"] {
                    let raw = 5.0 - 4.0 * defect + rng.random_range(-0.8..0.8);
                    let rating = raw.round().clamp(1.0, 5.0) as u8;
                    records.push(AnnotationRecord::new(&video_id, d, annotator, rating, format!("pkg-{d}")).unwrap());
                }
            }
        }
    }
    write(&root.join("corpus/index.csv"), index);
    write(
        &root.join("annotations.csv"),
        format!(
            "# video_id,dimension,annotator_id,rating,package_id\n{}",
            write_annotations(&records)
        ),
    );

    write(&root.join("library.json"), library().to_json());
    let mut suite = csv::Writer::from_writer(Vec::new());
    suite
        .write_record(["id", "text", "mode", "subject", "place", "action"])
        .unwrap();
    for (i, (subject, place, action, mode, text)) in RELEASED.iter().enumerate() {
        suite
            .write_record([&format!("{}", i + 1), *text, *mode, *subject, *place, *action])
            .unwrap();
    }
    write(&root.join("released_suite.csv"), suite.into_inner().unwrap());
    write(&root.join("reviews.csv"), "prompt_id,accepted\n2,false\n");
    println!("fixtures written to {}", root.display());
}
