use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use boxnoise::coco::{dataset_from_instances, load_dataset, save_dataset, save_results, CocoDataset};
use boxnoise::corrector::CorrectionConfig;
use boxnoise::noise::NoiseModel;
use boxnoise::simulator::{run_experiment_full, SimConfig, SyntheticConfig};
use boxnoise::types::Instance;
use boxnoise::{Error, Result};

use super::Report;
use crate::SimulateArgs;

/// Where the clean instances come from.
#[derive(Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum InstanceSource {
    /// Generate boxes from the given layout.
    Synthetic(SyntheticConfig<f64>),
    /// Load a COCO annotation file; relative paths resolve against the
    /// config file's directory.
    File(PathBuf),
}

/// The experiment description read from `--config`.
#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Spec {
    /// Drives synthetic-box placement and annotation corruption. The
    /// teacher has its own seed so the two never share a stream.
    seed: u64,
    instances: InstanceSource,
    annotation_noise: NoiseModel<f64>,
    teacher: SimConfig<f64>,
    #[serde(default)]
    correction: CorrectionConfig<f64>,
}

fn load_spec(path: &Path) -> Result<Spec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Schema {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Builds the clean instance list plus a dataset shell for `--data-out`.
fn resolve_instances(
    spec: &Spec,
    config_dir: &Path,
) -> Result<(Vec<Instance<f64>>, CocoDataset)> {
    match &spec.instances {
        InstanceSource::Synthetic(cfg) => {
            let instances = boxnoise::simulator::synthesize_instances(cfg, spec.seed)?;
            let dataset = dataset_from_instances(&instances, cfg.image_width, cfg.image_height);
            Ok((instances, dataset))
        }
        InstanceSource::File(path) => {
            let resolved = if path.is_absolute() {
                path.clone()
            } else {
                config_dir.join(path)
            };
            let dataset = load_dataset(&resolved)?;
            let instances = dataset.instances()?;
            Ok((instances, dataset))
        }
    }
}

#[derive(Serialize)]
struct Config {
    config_file: PathBuf,
    out: PathBuf,
    /// The experiment description actually run, after any `--seed` override.
    spec: Spec,
}

pub fn run(args: SimulateArgs) -> Result<()> {
    let mut spec = load_spec(&args.config)?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let config_dir = args
        .config
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."))
        .to_path_buf();
    let (clean, dataset) = resolve_instances(&spec, &config_dir)?;

    let run = run_experiment_full(
        &clean,
        &spec.annotation_noise,
        &spec.teacher,
        &spec.correction,
        spec.seed,
    )?;

    if let Some(path) = &args.data_out {
        save_dataset(path, &dataset)?;
    }
    if let Some(path) = &args.preds_out {
        save_results(path, &run.predictions)?;
    }

    let report = Report::new(
        "simulate",
        Config {
            config_file: args.config.clone(),
            out: args.out.clone(),
            spec,
        },
        run.report,
    );
    report.emit(Some(&args.out))
}
