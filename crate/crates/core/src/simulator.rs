//! Synthetic data generation and end-to-end correction experiments.
//!
//! The simulator builds a clean dataset, corrupts its annotations with a
//! configurable noise model, fabricates detector-like predictions around the
//! clean boxes, runs the corrector, and measures how far the corrected
//! annotations moved back toward the truth.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corrector::{correct_dataset, CorrectionConfig, CorrectionReport};
use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::metrics::{boundary_summary, error_samples, BoundaryStats, PerBoundary};
use crate::noise::{corrupt_box, corrupt_dataset, NoiseModel};
use crate::real::{real, Real};
use crate::seeding::{derive_seed, stream_rng, DOMAIN_SYNTH, DOMAIN_TEACHER};
use crate::types::{Instance, Prediction};

/// How a simulated prediction's confidence score is produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScoreLaw<F> {
    /// Score = IoU with the clean box plus Gaussian noise, clamped to [0, 1].
    /// Mimics the loose correlation between confidence and localization
    /// quality seen in real detectors.
    IouProportional { noise_sd: F },
    /// Every prediction gets the same fixed score.
    Constant { score: F },
}

impl<F: Real> ScoreLaw<F> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ScoreLaw::IouProportional { noise_sd } => {
                if !noise_sd.is_finite() || noise_sd < F::zero() {
                    return Err(Error::InvalidConfig(format!(
                        "score noise must be finite and non-negative, got {:?}",
                        noise_sd
                    )));
                }
            }
            ScoreLaw::Constant { score } => {
                if !score.is_finite() || score < F::zero() || score > F::one() {
                    return Err(Error::InvalidConfig(format!(
                        "constant score must lie in [0, 1], got {:?}",
                        score
                    )));
                }
            }
        }
        Ok(())
    }

    fn eval<R: rand::Rng + ?Sized>(&self, iou: F, rng: &mut R) -> F {
        match *self {
            ScoreLaw::IouProportional { noise_sd } => {
                let noisy = iou + noise_sd * F::standard_normal(rng);
                noisy.max(F::zero()).min(F::one())
            }
            ScoreLaw::Constant { score } => score,
        }
    }
}

/// Configuration for the simulated detector ("teacher").
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig<F> {
    /// Predictions generated per instance.
    pub n_predictions: usize,
    /// Noise model applied to the clean box to produce each prediction.
    pub pred_noise: NoiseModel<F>,
    pub score_law: ScoreLaw<F>,
    /// Seed for the teacher's own random stream, independent of the
    /// annotation-corruption seed.
    pub seed: u64,
}

impl<F: Real> SimConfig<F> {
    pub fn validate(&self) -> Result<()> {
        if self.n_predictions == 0 {
            return Err(Error::InvalidConfig(
                "n_predictions must be at least 1".into(),
            ));
        }
        self.pred_noise.validate()?;
        self.score_law.validate()
    }
}

/// Simulated predictions for one instance plus how many had to be repaired
/// after noising inverted their corners.
#[derive(Debug, Clone)]
pub struct SimulatedPredictions<F> {
    pub predictions: Vec<Prediction<F>>,
    pub clamp_count: usize,
}

/// Draws `cfg.n_predictions` noisy copies of the clean box, scored by the
/// configured law. Draw order per prediction: box first, then score.
pub fn simulate_predictions<F: Real, R: rand::Rng + ?Sized>(
    clean: &Instance<F>,
    cfg: &SimConfig<F>,
    rng: &mut R,
) -> Result<SimulatedPredictions<F>> {
    cfg.validate()?;
    let mut predictions = Vec::with_capacity(cfg.n_predictions);
    let mut clamp_count = 0;
    for _ in 0..cfg.n_predictions {
        let noisy = corrupt_box(&clean.bbox, &cfg.pred_noise, rng)?;
        if noisy.clamped {
            clamp_count += 1;
        }
        let iou = noisy.bbox.iou(&clean.bbox);
        let score = cfg.score_law.eval(iou, rng);
        predictions.push(Prediction {
            image_id: clean.image_id,
            category_id: clean.category_id,
            bbox: noisy.bbox,
            score,
        });
    }
    Ok(SimulatedPredictions {
        predictions,
        clamp_count,
    })
}

/// Layout of a generated synthetic dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig<F> {
    /// Total instances to generate.
    pub count: usize,
    /// Instances sharing each image id.
    #[serde(default = "default_per_image")]
    pub instances_per_image: usize,
    pub image_width: F,
    pub image_height: F,
    /// Box widths and heights are drawn uniformly from this range.
    pub min_extent: F,
    pub max_extent: F,
    #[serde(default = "default_category")]
    pub category_id: u64,
}

fn default_per_image() -> usize {
    1
}

fn default_category() -> u64 {
    1
}

impl<F: Real> SyntheticConfig<F> {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidConfig("count must be at least 1".into()));
        }
        if self.instances_per_image == 0 {
            return Err(Error::InvalidConfig(
                "instances_per_image must be at least 1".into(),
            ));
        }
        let ok_dims = self.image_width.is_finite()
            && self.image_height.is_finite()
            && self.image_width > F::zero()
            && self.image_height > F::zero();
        if !ok_dims {
            return Err(Error::InvalidConfig(
                "image dimensions must be finite and positive".into(),
            ));
        }
        let max_fit = self.image_width.min(self.image_height);
        let ok_extent = self.min_extent.is_finite()
            && self.max_extent.is_finite()
            && self.min_extent > F::zero()
            && self.min_extent <= self.max_extent
            && self.max_extent <= max_fit;
        if !ok_extent {
            return Err(Error::InvalidConfig(
                "extent range must satisfy 0 < min <= max <= min(image dims)".into(),
            ));
        }
        Ok(())
    }
}

/// Generates `cfg.count` boxes placed uniformly at random inside the image,
/// ids 1..=count, image ids grouping `instances_per_image` consecutive
/// instances. Deterministic per instance: the same (seed, id) pair always
/// yields the same box regardless of count.
pub fn synthesize_instances<F: Real>(cfg: &SyntheticConfig<F>, seed: u64) -> Result<Vec<Instance<F>>> {
    cfg.validate()?;
    let master = derive_seed(seed, DOMAIN_SYNTH);
    let instances = (0..cfg.count)
        .into_par_iter()
        .map(|i| {
            let id = i as u64 + 1;
            let image_id = 1 + (i / cfg.instances_per_image) as u64;
            let mut rng = stream_rng(master, id);
            let span = (cfg.max_extent - cfg.min_extent).to_f64().unwrap_or(0.0);
            let min = cfg.min_extent.to_f64().unwrap_or(1.0);
            let w = min + rng.gen::<f64>() * span;
            let h = min + rng.gen::<f64>() * span;
            let max_x = cfg.image_width.to_f64().unwrap_or(0.0) - w;
            let max_y = cfg.image_height.to_f64().unwrap_or(0.0) - h;
            let x = rng.gen::<f64>() * max_x;
            let y = rng.gen::<f64>() * max_y;
            let bbox = BBox::new(real(x), real(y), real(x + w), real(y + h))?;
            Ok(Instance {
                id,
                image_id,
                category_id: cfg.category_id,
                bbox,
                iscrowd: false,
            })
        })
        .collect::<Result<Vec<Instance<F>>>>()?;
    Ok(instances)
}

/// Per-instance outcome of an experiment run.
#[derive(Debug, Clone, Serialize)]
pub struct InstanceOutcome<F> {
    pub id: u64,
    pub image_id: u64,
    /// IoU between the corrupted annotation and the clean box.
    pub iou_noisy: F,
    /// IoU between the corrected annotation and the clean box.
    pub iou_corrected: F,
    pub delta_sum: F,
    pub kept_predictions: usize,
}

/// Aggregate results of one experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport<F> {
    pub instance_count: usize,
    pub mean_iou_noisy: F,
    pub mean_iou_corrected: F,
    /// Per-boundary relative-error statistics of the corrupted annotations
    /// measured against the clean boxes.
    pub noisy_errors: PerBoundary<BoundaryStats<F>>,
    /// Same statistics after correction.
    pub corrected_errors: PerBoundary<BoundaryStats<F>>,
    pub ann_clamp_count: usize,
    pub pred_clamp_count: usize,
    pub unchanged_count: usize,
}

/// Everything an experiment produced, for callers that want the raw boxes.
#[derive(Debug, Clone)]
pub struct ExperimentRun<F> {
    pub report: ExperimentReport<F>,
    pub per_instance: Vec<InstanceOutcome<F>>,
    pub predictions: Vec<Prediction<F>>,
    pub noisy: Vec<Instance<F>>,
    pub corrected: Vec<Instance<F>>,
    pub correction: CorrectionReport<F>,
}

/// Runs the full pipeline: corrupt annotations, simulate predictions,
/// correct, and score. `seed` drives the annotation corruption; the teacher
/// stream comes from `sim.seed`, so the two sources of randomness never
/// align even when given equal values.
pub fn run_experiment_full<F: Real>(
    clean: &[Instance<F>],
    ann_noise: &NoiseModel<F>,
    sim: &SimConfig<F>,
    correction: &CorrectionConfig<F>,
    seed: u64,
) -> Result<ExperimentRun<F>> {
    if clean.is_empty() {
        return Err(Error::EmptyInput("experiment needs at least one instance"));
    }
    ann_noise.validate()?;
    sim.validate()?;
    correction.validate()?;

    let corrupted = corrupt_dataset(clean, ann_noise, seed)?;

    let teacher_master = derive_seed(sim.seed, DOMAIN_TEACHER);
    let simulated = clean
        .par_iter()
        .map(|inst| {
            let mut rng = stream_rng(teacher_master, inst.id);
            simulate_predictions(inst, sim, &mut rng)
                .map_err(|e| Error::Instance {
                    id: inst.id,
                    source: Box::new(e),
                })
        })
        .collect::<Result<Vec<SimulatedPredictions<F>>>>()?;
    let pred_clamp_count = simulated.iter().map(|s| s.clamp_count).sum();
    let predictions: Vec<Prediction<F>> = simulated
        .into_iter()
        .flat_map(|s| s.predictions)
        .collect();

    let outcome = correct_dataset(&corrupted.instances, &predictions, correction)?;

    let n = real::<F>(clean.len() as f64);
    let mut per_instance = Vec::with_capacity(clean.len());
    let mut sum_noisy = F::zero();
    let mut sum_corrected = F::zero();
    for ((orig, noisy), (fixed, detail)) in clean
        .iter()
        .zip(&corrupted.instances)
        .zip(outcome.instances.iter().zip(&outcome.report.per_instance))
    {
        let iou_noisy = noisy.bbox.iou(&orig.bbox);
        let iou_corrected = fixed.bbox.iou(&orig.bbox);
        sum_noisy = sum_noisy + iou_noisy;
        sum_corrected = sum_corrected + iou_corrected;
        per_instance.push(InstanceOutcome {
            id: orig.id,
            image_id: orig.image_id,
            iou_noisy,
            iou_corrected,
            delta_sum: detail.delta_sum,
            kept_predictions: detail.kept_predictions,
        });
    }

    let noisy_errors = boundary_summary(&error_samples(clean, &corrupted.instances)?);
    let corrected_errors = boundary_summary(&error_samples(clean, &outcome.instances)?);

    let report = ExperimentReport {
        instance_count: clean.len(),
        mean_iou_noisy: sum_noisy / n,
        mean_iou_corrected: sum_corrected / n,
        noisy_errors,
        corrected_errors,
        ann_clamp_count: corrupted.clamp_count,
        pred_clamp_count,
        unchanged_count: outcome.report.unchanged_count,
    };

    Ok(ExperimentRun {
        report,
        per_instance,
        predictions,
        noisy: corrupted.instances,
        corrected: outcome.instances,
        correction: outcome.report,
    })
}

/// [`run_experiment_full`] without the raw per-box payloads.
pub fn run_experiment<F: Real>(
    clean: &[Instance<F>],
    ann_noise: &NoiseModel<F>,
    sim: &SimConfig<F>,
    correction: &CorrectionConfig<F>,
    seed: u64,
) -> Result<ExperimentReport<F>> {
    run_experiment_full(clean, ann_noise, sim, correction, seed).map(|run| run.report)
}
