use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;

use boxnoise::coco::{load_dataset, save_text};
use boxnoise::metrics::{
    boundary_summary, correlation_matrix, error_samples, scale_scatter, BoundaryStats,
    CorrelationMatrix, PerBoundary, ScaleScatter,
};
use boxnoise::noise::estimate_noise_level;
use boxnoise::{Error, Result};

use super::Report;
use crate::AnalyzeArgs;

#[derive(Serialize)]
struct Config {
    reference: PathBuf,
    candidate: PathBuf,
    out: PathBuf,
}

#[derive(Serialize)]
struct Body {
    instance_count: usize,
    /// Statistics of the candidate's relative boundary errors against the
    /// reference.
    boundaries: PerBoundary<BoundaryStats<f64>>,
    /// RMS relative error pooled over all four boundaries.
    pooled_gamma: f64,
    /// Pearson correlations between the four boundary errors. Null when
    /// fewer than two instances are available.
    correlation: Option<CorrelationMatrix<f64>>,
    /// Absolute error magnitude against object extent, with the
    /// through-origin regression slope.
    scatter: ScaleScatter<f64>,
}

pub fn run(args: AnalyzeArgs) -> Result<()> {
    let reference = load_dataset(&args.reference)?.instances()?;
    let candidate = load_dataset(&args.candidate)?.instances()?;
    if reference.is_empty() {
        return Err(Error::EmptyInput("reference file has no annotations"));
    }

    let samples = error_samples(&reference, &candidate)?;
    let boundaries = boundary_summary(&samples);
    let relative: Vec<f64> = samples.iter().map(|s| s.relative_error).collect();
    let pooled_gamma = estimate_noise_level(&relative)?;
    let correlation = match correlation_matrix(&samples) {
        Ok(matrix) => Some(matrix),
        Err(Error::EmptyInput(_)) => None,
        Err(other) => return Err(other),
    };
    let scatter = scale_scatter(&samples);

    if let Some(path) = &args.csv {
        let mut csv = String::from("instance_id,boundary,extent,absolute_error,relative_error\n");
        for s in &samples {
            writeln!(
                csv,
                "{},{},{},{},{}",
                s.instance_id,
                s.boundary.name(),
                s.object_extent,
                s.absolute_error,
                s.relative_error
            )
            .expect("writing to a string cannot fail");
        }
        save_text(path, &csv)?;
    }

    let report = Report::new(
        "analyze",
        Config {
            reference: args.reference.clone(),
            candidate: args.candidate.clone(),
            out: args.out.clone(),
        },
        Body {
            instance_count: reference.len(),
            boundaries,
            pooled_gamma,
            correlation,
            scatter,
        },
    );
    report.emit(Some(&args.out))
}
