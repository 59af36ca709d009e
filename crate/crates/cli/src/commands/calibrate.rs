use motionbench_core::calibration::{calibrate_with, CalibrationOptions};
use motionbench_core::skeleton::SkeletonRegistry;
use motionbench_core::thresholds::ThresholdOverrides;

use crate::args::CalibrateArgs;
use crate::corpus;
use crate::output::{read_json, Outputs};
use crate::CliError;

pub fn registry(extra: Option<&std::path::Path>) -> Result<SkeletonRegistry, CliError> {
    let mut reg = SkeletonRegistry::builtin();
    if let Some(path) = extra {
        reg.extend_from_file(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    }
    Ok(reg)
}

pub fn run(a: &CalibrateArgs, out: &Outputs) -> Result<(), CliError> {
    if !(a.quantile > 0.0 && a.quantile < 1.0) {
        return Err(CliError::Config(format!(
            "--quantile must lie in (0,1), got {}",
            a.quantile
        )));
    }
    if a.floor.is_nan() || a.floor <= 0.0 {
        return Err(CliError::Config(format!("--floor must be positive, got {}", a.floor)));
    }
    let overrides: ThresholdOverrides = match &a.overrides {
        Some(p) => read_json(p)?,
        None => ThresholdOverrides::default(),
    };
    let reg = registry(a.skeletons.as_deref())?;
    let loaded = corpus::load_dir(&a.reference)?;
    let mut bundles = Vec::new();
    for (entry, result) in loaded {
        match result {
            Ok(b) => bundles.push(b),
            Err(e) => eprintln!("skipping {}: {e}", entry.video_id),
        }
    }
    if bundles.is_empty() {
        return Err(CliError::Corpus("no reference bundle could be parsed".into()));
    }
    let corpus_id = a.corpus_id.clone().unwrap_or_else(|| {
        a.reference
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    let opts = CalibrationOptions {
        corpus_id,
        min_samples: a.min_samples,
        floor: a.floor,
        ..Default::default()
    };
    let set =
        calibrate_with(&bundles, a.quantile, &overrides, &opts, &reg).map_err(|e| CliError::Corpus(e.to_string()))?;
    set.validate().map_err(|e| CliError::Config(e.to_string()))?;
    println!(
        "calibrated from {} bundles: {} MSS and {} PAS scenario thresholds, {} fallbacks",
        bundles.len(),
        set.mss.len(),
        set.pas.len(),
        set.provenance.insufficient.len()
    );
    out.json("thresholds.json", &set)
}
