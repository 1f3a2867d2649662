use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use boxnoise::coco::{load_dataset, load_results, save_dataset};
use boxnoise::corrector::{correct_dataset, CorrectionConfig, CorrectionReport, WeightFn};
use boxnoise::{Error, Result};

use super::Report;
use crate::CorrectArgs;

/// Correction settings as they appear in a `--config` file. Every field is
/// optional; missing ones fall back to flags or defaults.
#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    weight: Option<WeightFn<f64>>,
    iou_floor: Option<f64>,
    score_floor: Option<f64>,
    top_k: Option<usize>,
}

fn load_file_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Schema {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Flags beat config-file values, which beat defaults.
fn effective_config(args: &CorrectArgs, file: FileConfig) -> CorrectionConfig<f64> {
    let defaults = CorrectionConfig::default();
    CorrectionConfig {
        weight: args.weight.or(file.weight).unwrap_or(defaults.weight),
        iou_floor: args
            .iou_floor
            .or(file.iou_floor)
            .unwrap_or(defaults.iou_floor),
        score_floor: args
            .score_floor
            .or(file.score_floor)
            .unwrap_or(defaults.score_floor),
        top_k: args.top_k.or(file.top_k).unwrap_or(defaults.top_k),
    }
}

#[derive(Serialize)]
struct Config {
    ann: PathBuf,
    preds: PathBuf,
    out: PathBuf,
    correction: CorrectionConfig<f64>,
}

#[derive(Serialize)]
struct Body {
    #[serde(flatten)]
    report: CorrectionReport<f64>,
    /// Share of annotations the corrector left untouched.
    unchanged_fraction: f64,
}

pub fn run(args: CorrectArgs) -> Result<()> {
    let file = match &args.config {
        Some(path) => load_file_config(path)?,
        None => FileConfig::default(),
    };
    let correction = effective_config(&args, file);

    let mut dataset = load_dataset(&args.ann)?;
    let annotations = dataset.instances()?;
    let predictions = load_results(&args.preds)?;

    let outcome = correct_dataset(&annotations, &predictions, &correction)?;
    dataset.apply_boxes(&outcome.instances)?;
    save_dataset(&args.out, &dataset)?;

    let unchanged_fraction = if outcome.report.instance_count == 0 {
        1.0
    } else {
        outcome.report.unchanged_count as f64 / outcome.report.instance_count as f64
    };
    let report = Report::new(
        "correct",
        Config {
            ann: args.ann,
            preds: args.preds,
            out: args.out,
            correction,
        },
        Body {
            report: outcome.report,
            unchanged_fraction,
        },
    );
    report.emit(args.report.as_deref())
}
