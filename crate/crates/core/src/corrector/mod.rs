//! Correction of noisy annotations by fusing them with detector predictions.
//!
//! Each annotation is treated as a prior estimate of the true box and every
//! qualifying prediction as an independent measurement. With a prediction's
//! trust expressed as a scalar weight `delta_i` relative to the prior, the
//! posterior has the closed form applied per boundary:
//!
//! ```text
//! corrected = (annotation + sum(delta_i * prediction_i)) / (1 + sum(delta_i))
//! ```
//!
//! `delta_i` combines geometric agreement with the annotation and the
//! prediction's confidence: `f(IoU(prediction, annotation)) * score`, where
//! `f` is one of [`WeightFn`]. The general matrix form of the same estimator
//! lives in [`kalman`]; this scalar path is what dataset correction uses.

pub mod kalman;

use std::collections::{BTreeSet, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::noise::sanitize_corners;
use crate::real::{real, Real};
use crate::types::{Instance, Prediction};

/// Maps a prediction's IoU with the annotation to a gating factor in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeightFn<F> {
    /// Hard gate: 1 when IoU >= tau, else 0.
    Step { tau: F },
    /// Smooth gate peaking at IoU = 1: `exp(-(1 - iou)^2 / alpha)`.
    Gaussian { alpha: F },
}

impl<F: Real> WeightFn<F> {
    /// Evaluates the gate at the given IoU.
    pub fn eval(&self, iou: F) -> F {
        match *self {
            WeightFn::Step { tau } => {
                if iou >= tau {
                    F::one()
                } else {
                    F::zero()
                }
            }
            WeightFn::Gaussian { alpha } => {
                let d = F::one() - iou;
                (-d * d / alpha).exp()
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightFn::Step { tau } => {
                if !tau.is_finite() || tau < F::zero() || tau > F::one() {
                    return Err(Error::InvalidConfig(format!(
                        "step threshold tau must lie in [0, 1], got {:?}",
                        tau
                    )));
                }
            }
            WeightFn::Gaussian { alpha } => {
                if !alpha.is_finite() || alpha <= F::zero() {
                    return Err(Error::InvalidConfig(format!(
                        "gaussian width alpha must be finite and positive, got {:?}",
                        alpha
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Knobs for one correction pass: the gate, the pre-filter floors, and the
/// ensemble size cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorrectionConfig<F> {
    pub weight: WeightFn<F>,
    /// Predictions with IoU below this never enter the ensemble.
    pub iou_floor: F,
    /// Predictions scoring below this never enter the ensemble.
    pub score_floor: F,
    /// At most this many predictions are kept, highest score first.
    pub top_k: usize,
}

impl<F: Real> Default for CorrectionConfig<F> {
    fn default() -> Self {
        CorrectionConfig {
            weight: WeightFn::Step { tau: real(0.7) },
            iou_floor: real(0.5),
            score_floor: real(0.05),
            top_k: 1000,
        }
    }
}

impl<F: Real> CorrectionConfig<F> {
    pub fn validate(&self) -> Result<()> {
        self.weight.validate()?;
        let unit = |v: F, what: &str| {
            if !v.is_finite() || v < F::zero() || v > F::one() {
                Err(Error::InvalidConfig(format!(
                    "{what} must lie in [0, 1], got {v:?}"
                )))
            } else {
                Ok(())
            }
        };
        unit(self.iou_floor, "iou_floor")?;
        unit(self.score_floor, "score_floor")
    }
}

/// The ensemble weight of one prediction for one annotation:
/// `f(IoU(prediction, annotation)) * score`, zero when the prediction scores
/// a different category.
pub fn prediction_weight<F: Real>(
    prediction: &Prediction<F>,
    annotation: &Instance<F>,
    weight: &WeightFn<F>,
) -> F {
    match prediction.score_for(annotation.category_id) {
        Some(score) => weight.eval(prediction.bbox.iou(&annotation.bbox)) * score,
        None => F::zero(),
    }
}

/// Applies the ensemble pre-filter for one annotation: drops predictions
/// below the IoU or score floors (and those scoring a different category),
/// then keeps at most `top_k` by score. Score ties break toward the earlier
/// prediction. The survivors come back ordered by descending score.
pub fn filter_predictions<'a, F: Real>(
    predictions: impl IntoIterator<Item = &'a Prediction<F>>,
    annotation: &Instance<F>,
    cfg: &CorrectionConfig<F>,
) -> Vec<&'a Prediction<F>> {
    let mut kept: Vec<(usize, &Prediction<F>)> = predictions
        .into_iter()
        .enumerate()
        .filter(|(_, p)| {
            let score = match p.score_for(annotation.category_id) {
                Some(s) => s,
                None => return false,
            };
            score >= cfg.score_floor && p.bbox.iou(&annotation.bbox) >= cfg.iou_floor
        })
        .collect();
    kept.sort_by(|(ia, a), (ib, b)| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(ia.cmp(ib))
    });
    kept.truncate(cfg.top_k);
    kept.into_iter().map(|(_, p)| p).collect()
}

/// Fuses a prior box with weighted measurement boxes, per boundary:
/// `(prior + sum(w_i * box_i)) / (1 + sum(w_i))`. With no weight mass the
/// prior is returned unchanged.
pub fn fuse_boundaries<F: Real>(prior: &BBox<F>, weighted: &[(BBox<F>, F)]) -> BBox<F> {
    let mut sums = prior.corners();
    let mut total = F::one();
    for (bbox, w) in weighted {
        debug_assert!(*w >= F::zero(), "ensemble weights must be non-negative");
        let c = bbox.corners();
        for (s, v) in sums.iter_mut().zip(c) {
            *s = *s + *w * v;
        }
        total = total + *w;
    }
    if total == F::one() {
        return *prior;
    }
    let [l, t, r, b] = sums.map(|s| s / total);
    sanitize_corners(l, t, r, b).0
}

/// One corrected annotation box with its ensemble accounting.
#[derive(Debug, Clone, Copy)]
pub struct CorrectedBox<F> {
    pub bbox: BBox<F>,
    /// Total ensemble weight that pulled the box away from the annotation.
    pub delta_sum: F,
    /// Predictions that survived the pre-filter.
    pub kept: usize,
}

/// Corrects one annotation against raw predictions (the pre-filter runs
/// internally) and reports the ensemble accounting.
pub fn correct_box_detail<'a, F: Real>(
    annotation: &Instance<F>,
    predictions: impl IntoIterator<Item = &'a Prediction<F>>,
    cfg: &CorrectionConfig<F>,
) -> CorrectedBox<F> {
    let kept = filter_predictions(predictions, annotation, cfg);
    let weighted: Vec<(BBox<F>, F)> = kept
        .iter()
        .map(|p| (p.bbox, prediction_weight(p, annotation, &cfg.weight)))
        .collect();
    let delta_sum = weighted.iter().fold(F::zero(), |acc, (_, w)| acc + *w);
    let bbox = if delta_sum == F::zero() {
        annotation.bbox
    } else {
        fuse_boundaries(&annotation.bbox, &weighted)
    };
    CorrectedBox {
        bbox,
        delta_sum,
        kept: kept.len(),
    }
}

/// Corrects one annotation against raw predictions, returning just the box.
pub fn correct_box<'a, F: Real>(
    annotation: &Instance<F>,
    predictions: impl IntoIterator<Item = &'a Prediction<F>>,
    cfg: &CorrectionConfig<F>,
) -> BBox<F> {
    correct_box_detail(annotation, predictions, cfg).bbox
}

/// Per-instance accounting for one correction pass.
#[derive(Debug, Clone, Serialize)]
pub struct InstanceCorrection<F> {
    pub id: u64,
    pub delta_sum: F,
    pub kept_predictions: usize,
    pub changed: bool,
}

/// Accounting for a whole correction pass.
#[derive(Debug, Clone, Serialize)]
pub struct CorrectionReport<F> {
    pub instance_count: usize,
    /// Annotations whose box came back identical (no usable ensemble).
    pub unchanged_count: usize,
    pub per_instance: Vec<InstanceCorrection<F>>,
    /// Predictions referencing an image no annotation lives in. They are
    /// unused, reported here rather than failing the pass.
    pub unknown_image_prediction_count: usize,
    pub unknown_image_ids: Vec<u64>,
}

/// A corrected dataset plus its report.
#[derive(Debug, Clone)]
pub struct CorrectionOutcome<F> {
    pub instances: Vec<Instance<F>>,
    pub report: CorrectionReport<F>,
}

/// Corrects every annotation against the predictions of its image.
/// Annotation ids, image ids, categories, and crowd flags pass through
/// untouched; only boxes move.
pub fn correct_dataset<F: Real>(
    annotations: &[Instance<F>],
    predictions: &[Prediction<F>],
    cfg: &CorrectionConfig<F>,
) -> Result<CorrectionOutcome<F>> {
    cfg.validate()?;
    let mut by_image: HashMap<u64, Vec<&Prediction<F>>> = HashMap::new();
    for pred in predictions {
        by_image.entry(pred.image_id).or_default().push(pred);
    }
    let known: HashSet<u64> = annotations.iter().map(|a| a.image_id).collect();
    let unknown_ids: BTreeSet<u64> = predictions
        .iter()
        .map(|p| p.image_id)
        .filter(|id| !known.contains(id))
        .collect();
    let unknown_image_prediction_count = predictions
        .iter()
        .filter(|p| !known.contains(&p.image_id))
        .count();

    let empty: Vec<&Prediction<F>> = Vec::new();
    let corrected: Vec<(Instance<F>, InstanceCorrection<F>)> = annotations
        .par_iter()
        .map(|ann| {
            let pool = by_image.get(&ann.image_id).unwrap_or(&empty);
            let out = correct_box_detail(ann, pool.iter().copied(), cfg);
            let changed = out.bbox != ann.bbox;
            (
                Instance {
                    bbox: out.bbox,
                    ..ann.clone()
                },
                InstanceCorrection {
                    id: ann.id,
                    delta_sum: out.delta_sum,
                    kept_predictions: out.kept,
                    changed,
                },
            )
        })
        .collect();

    let unchanged_count = corrected.iter().filter(|(_, c)| !c.changed).count();
    let (instances, per_instance): (Vec<_>, Vec<_>) = corrected.into_iter().unzip();
    Ok(CorrectionOutcome {
        report: CorrectionReport {
            instance_count: instances.len(),
            unchanged_count,
            per_instance,
            unknown_image_prediction_count,
            unknown_image_ids: unknown_ids.into_iter().collect(),
        },
        instances,
    })
}
