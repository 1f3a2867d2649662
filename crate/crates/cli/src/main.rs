//! Command-line front end for the box-noise toolkit.
//!
//! Exit codes: 0 on success, 1 on usage errors (bad flags or arguments),
//! 2 on data or configuration errors encountered while running.

mod commands;

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use boxnoise::corrector::WeightFn;
use boxnoise::noise::NoiseModel;

#[derive(Parser)]
#[command(
    name = "boxnoise",
    version,
    about = "Synthesize, correct, and evaluate location noise in box annotations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Add controlled location noise to every annotation box.
    Corrupt(CorruptArgs),
    /// Pull noisy boxes toward detector predictions via precision-weighted fusion.
    Correct(CorrectArgs),
    /// Run a corrupt/predict/correct experiment from a config file.
    Simulate(SimulateArgs),
    /// Compare two annotation files: boundary errors, correlations, scale scatter.
    Analyze(AnalyzeArgs),
    /// Score predictions against ground truth with COCO-style average precision.
    EvalAp(EvalApArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelKind {
    /// Independent Gaussian offsets on all four boundaries.
    Gaussian,
    /// One-sided exponential offsets pushing every boundary outward.
    ExpEnclosing,
    /// One-sided exponential offsets pulling every boundary inward.
    ExpEnclosed,
}

impl ModelKind {
    fn with_gamma(self, gamma: f64) -> NoiseModel<f64> {
        match self {
            ModelKind::Gaussian => NoiseModel::Gaussian { gamma },
            ModelKind::ExpEnclosing => NoiseModel::ExpEnclosing { gamma },
            ModelKind::ExpEnclosed => NoiseModel::ExpEnclosed { gamma },
        }
    }
}

#[derive(clap::Args)]
struct CorruptArgs {
    /// Input COCO annotation file.
    #[arg(long, value_name = "FILE")]
    ann: PathBuf,
    /// Noise model applied to every box.
    #[arg(long, value_enum)]
    model: ModelKind,
    /// Noise level: RMS boundary error relative to the box extent.
    #[arg(long)]
    gamma: f64,
    /// Seed for the noise stream; equal seeds give byte-identical output.
    #[arg(long)]
    seed: u64,
    /// Output annotation file.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Clip noisy boxes to the image bounds declared in the input file.
    #[arg(long)]
    clip_to_image: bool,
    /// Also write the summary JSON printed on stdout to this file.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

#[derive(clap::Args)]
struct CorrectArgs {
    /// Noisy COCO annotation file to correct.
    #[arg(long, value_name = "FILE")]
    ann: PathBuf,
    /// Detector predictions in COCO results format.
    #[arg(long, value_name = "FILE")]
    preds: PathBuf,
    /// Prediction weighting: "step:TAU" or "gauss:ALPHA".
    #[arg(long, value_parser = parse_weight)]
    weight: Option<WeightFn<f64>>,
    /// Drop predictions overlapping an annotation below this IoU.
    #[arg(long)]
    iou_floor: Option<f64>,
    /// Drop predictions scored below this confidence.
    #[arg(long)]
    score_floor: Option<f64>,
    /// Keep at most this many predictions per annotation, by score.
    #[arg(long)]
    top_k: Option<usize>,
    /// Output annotation file.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// JSON file with correction settings; flags override its values.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Also write the report JSON printed on stdout to this file.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SimulateArgs {
    /// Experiment description; see `simulate --help` for the schema.
    ///
    /// JSON object with fields: seed (integer), instances (either
    /// {"synthetic": {count, image_width, image_height, min_extent,
    /// max_extent, ...}} or {"file": "annotations.json"}),
    /// annotation_noise (e.g. {"kind": "gaussian", "gamma": 0.1}),
    /// teacher ({n_predictions, pred_noise, score_law, seed}), and
    /// correction (optional; same fields as the correct subcommand).
    /// Relative instance file paths resolve against the config file.
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Report output file.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Override the top-level seed from the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the clean input annotations as a COCO dataset.
    #[arg(long, value_name = "FILE")]
    data_out: Option<PathBuf>,
    /// Write the simulated detector output as a COCO results file.
    #[arg(long, value_name = "FILE")]
    preds_out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct AnalyzeArgs {
    /// Reference annotations (treated as ground truth).
    #[arg(long = "ref", value_name = "FILE")]
    reference: PathBuf,
    /// Candidate annotations with the same instance ids.
    #[arg(long = "cand", value_name = "FILE")]
    candidate: PathBuf,
    /// Report output file.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Also write per-boundary samples as CSV.
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
}

#[derive(clap::Args)]
struct EvalApArgs {
    /// Ground-truth COCO annotation file.
    #[arg(long, value_name = "FILE")]
    gt: PathBuf,
    /// Predictions in COCO results format.
    #[arg(long, value_name = "FILE")]
    preds: PathBuf,
    /// Report output file.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Comma-separated IoU thresholds (default: 0.50 to 0.95 by 0.05).
    #[arg(long, value_delimiter = ',', value_name = "T,T,...")]
    thresholds: Option<Vec<f64>>,
}

fn parse_weight(s: &str) -> Result<WeightFn<f64>, String> {
    let (kind, value) = s
        .split_once(':')
        .ok_or_else(|| format!("expected KIND:VALUE, got {s:?}"))?;
    let value: f64 = value
        .parse()
        .map_err(|_| format!("{value:?} is not a number"))?;
    match kind {
        "step" => Ok(WeightFn::Step { tau: value }),
        "gauss" => Ok(WeightFn::Gaussian { alpha: value }),
        other => Err(format!(
            "unknown weight kind {other:?} (expected \"step\" or \"gauss\")"
        )),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    let result = match cli.command {
        Command::Corrupt(args) => commands::corrupt::run(args),
        Command::Correct(args) => commands::correct::run(args),
        Command::Simulate(args) => commands::simulate::run(args),
        Command::Analyze(args) => commands::analyze::run(args),
        Command::EvalAp(args) => commands::eval_ap::run(args),
    };
    if let Err(err) = result {
        eprintln!("error[{}]: {err}", err.code());
        std::process::exit(2);
    }
}
