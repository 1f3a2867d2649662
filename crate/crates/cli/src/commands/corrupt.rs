use std::path::PathBuf;

use serde::Serialize;

use boxnoise::coco::{load_dataset, save_dataset};
use boxnoise::metrics::{boundary_summary, error_samples, BoundaryStats, PerBoundary};
use boxnoise::noise::{corrupt_dataset, estimate_noise_level, NoiseModel};
use boxnoise::{Error, Result};

use super::Report;
use crate::CorruptArgs;

#[derive(Serialize)]
struct Config {
    ann: PathBuf,
    model: NoiseModel<f64>,
    seed: u64,
    out: PathBuf,
    clip_to_image: bool,
}

#[derive(Serialize)]
struct Summary {
    instance_count: usize,
    /// Boxes whose noisy corners inverted and were repaired.
    clamp_count: usize,
    /// Boxes pulled back inside their image (when clipping is on).
    clip_count: usize,
    /// Noise level actually realized in the output, measured against the
    /// input. Null when the file has no annotations.
    empirical: Option<Empirical>,
}

#[derive(Serialize)]
struct Empirical {
    per_boundary: PerBoundary<BoundaryStats<f64>>,
    /// RMS relative error pooled over all boundaries; this is the
    /// quantity `--gamma` controls.
    pooled_gamma: f64,
}

pub fn run(args: CorruptArgs) -> Result<()> {
    let model = args.model.with_gamma(args.gamma);
    let mut dataset = load_dataset(&args.ann)?;
    let clean = dataset.instances()?;

    let corrupted = corrupt_dataset(&clean, &model, args.seed)?;
    let mut noisy = corrupted.instances;

    let mut clip_count = 0;
    if args.clip_to_image {
        for inst in &mut noisy {
            let (w, h) = dataset.image_size(inst.image_id).ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "--clip-to-image requires width and height for image {}",
                    inst.image_id
                ))
            })?;
            let clipped = inst.bbox.clipped_to_image(w, h);
            if clipped != inst.bbox {
                clip_count += 1;
                inst.bbox = clipped;
            }
        }
    }

    let empirical = if clean.is_empty() {
        None
    } else {
        let samples = error_samples(&clean, &noisy)?;
        let relative: Vec<f64> = samples.iter().map(|s| s.relative_error).collect();
        Some(Empirical {
            per_boundary: boundary_summary(&samples),
            pooled_gamma: estimate_noise_level(&relative)?,
        })
    };

    dataset.apply_boxes(&noisy)?;
    save_dataset(&args.out, &dataset)?;

    let report = Report::new(
        "corrupt",
        Config {
            ann: args.ann,
            model,
            seed: args.seed,
            out: args.out,
            clip_to_image: args.clip_to_image,
        },
        Summary {
            instance_count: noisy.len(),
            clamp_count: corrupted.clamp_count,
            clip_count,
            empirical,
        },
    );
    report.emit(args.report.as_deref())
}
