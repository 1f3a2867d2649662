use std::path::PathBuf;

use serde::Serialize;

use boxnoise::coco::{load_dataset, load_results};
use boxnoise::metrics::{coco_thresholds, evaluate_ap, ApResult};
use boxnoise::Result;

use super::Report;
use crate::EvalApArgs;

#[derive(Serialize)]
struct Config {
    gt: PathBuf,
    preds: PathBuf,
    out: PathBuf,
    thresholds: Vec<f64>,
}

pub fn run(args: EvalApArgs) -> Result<()> {
    let ground_truth = load_dataset(&args.gt)?.instances()?;
    let predictions = load_results(&args.preds)?;
    let thresholds = args.thresholds.clone().unwrap_or_else(coco_thresholds);

    let result: ApResult<f64> = evaluate_ap(&predictions, &ground_truth, &thresholds)?;

    let report = Report::new(
        "eval-ap",
        Config {
            gt: args.gt.clone(),
            preds: args.preds.clone(),
            out: args.out.clone(),
            thresholds,
        },
        result,
    );
    report.emit(Some(&args.out))
}
