//! COCO-style average precision.
//!
//! Predictions are matched greedily per (category, image) in descending
//! score order; each prediction takes the unmatched ground-truth box of
//! highest IoU at or above the threshold. Precision is interpolated at 101
//! evenly spaced recall points and averaged. Crowd ground truth is excluded
//! from matching and from the recall denominator. Size buckets reuse COCO's
//! area brackets; within a bucket, out-of-bracket ground truth is ignored
//! rather than counted, and an unmatched prediction is only a false
//! positive if its own area lies inside the bracket.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::{real, Real};
use crate::types::{Instance, Prediction};

/// The standard COCO threshold grid: 0.50 to 0.95 in steps of 0.05.
pub fn coco_thresholds<F: Real>() -> Vec<F> {
    (50..=95)
        .step_by(5)
        .map(|t| real::<F>(t as f64 / 100.0))
        .collect()
}

/// Average precision at one IoU threshold, averaged over categories.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThresholdAp<F> {
    pub threshold: F,
    pub ap: F,
}

/// Mean AP over thresholds for one object-size bracket. `None` when the
/// bracket contains no ground truth.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SizeBucketAp<F> {
    pub bucket: &'static str,
    pub ap: Option<F>,
}

/// Full AP evaluation output. `map` is the arithmetic mean of the
/// per-threshold APs (equivalently, of the per-category means).
#[derive(Debug, Clone, Serialize)]
pub struct ApResult<F> {
    pub map: F,
    pub per_threshold: Vec<ThresholdAp<F>>,
    pub per_category: BTreeMap<u64, F>,
    pub by_size: Vec<SizeBucketAp<F>>,
    /// Prediction categories absent from the ground truth; such predictions
    /// were ignored.
    pub unknown_category_ids: Vec<u64>,
}

const AREA_BRACKETS: [(&str, f64, f64); 3] = [
    ("small", 0.0, 32.0 * 32.0),
    ("medium", 32.0 * 32.0, 96.0 * 96.0),
    ("large", 96.0 * 96.0, f64::INFINITY),
];

struct CategoryEval<'a, F> {
    /// (category, image) -> ground truth, sorted by id.
    gts: HashMap<u64, Vec<&'a Instance<F>>>,
    /// Predictions sorted by descending score, input order on ties.
    preds: Vec<&'a Prediction<F>>,
    total_gt: usize,
}

/// Evaluates COCO-style AP over the given strictly increasing IoU
/// thresholds. Prediction scores must lie in [0, 1]; the ground truth must
/// contain at least one non-crowd instance.
pub fn evaluate_ap<F: Real>(
    predictions: &[Prediction<F>],
    ground_truth: &[Instance<F>],
    thresholds: &[F],
) -> Result<ApResult<F>> {
    if thresholds.is_empty() {
        return Err(Error::InvalidConfig("thresholds must be non-empty".into()));
    }
    if thresholds
        .iter()
        .any(|t| !t.is_finite() || *t < F::zero() || *t > F::one())
    {
        return Err(Error::InvalidConfig(
            "thresholds must lie in [0, 1]".into(),
        ));
    }
    for pair in thresholds.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::InvalidConfig(
                "thresholds must be strictly increasing".into(),
            ));
        }
    }
    for p in predictions {
        if !p.score.is_finite() || p.score < F::zero() || p.score > F::one() {
            return Err(Error::ScoreOutOfRange {
                score: p.score.to_f64().unwrap_or(f64::NAN),
                context: format!("prediction for image {}", p.image_id),
            });
        }
    }

    let usable: Vec<&Instance<F>> = ground_truth.iter().filter(|g| !g.iscrowd).collect();
    if usable.is_empty() {
        return Err(Error::EmptyInput("ground truth has no non-crowd instances"));
    }
    let categories: BTreeSet<u64> = usable.iter().map(|g| g.category_id).collect();
    let unknown_category_ids: Vec<u64> = predictions
        .iter()
        .map(|p| p.category_id)
        .filter(|c| !categories.contains(c))
        .collect::<BTreeSet<u64>>()
        .into_iter()
        .collect();

    let mut evals: BTreeMap<u64, CategoryEval<F>> = categories
        .iter()
        .map(|&c| {
            (
                c,
                CategoryEval {
                    gts: HashMap::new(),
                    preds: Vec::new(),
                    total_gt: 0,
                },
            )
        })
        .collect();
    for g in &usable {
        let eval = evals.get_mut(&g.category_id).unwrap();
        eval.gts.entry(g.image_id).or_default().push(g);
        eval.total_gt += 1;
    }
    for eval in evals.values_mut() {
        for gts in eval.gts.values_mut() {
            gts.sort_by_key(|g| g.id);
        }
    }
    for p in predictions {
        if let Some(eval) = evals.get_mut(&p.category_id) {
            eval.preds.push(p);
        }
    }
    for eval in evals.values_mut() {
        let mut indexed: Vec<(usize, &Prediction<F>)> =
            eval.preds.iter().copied().enumerate().collect();
        indexed.sort_by(|(ia, a), (ib, b)| {
            b.score
                .partial_cmp(&a.score)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(ia.cmp(ib))
        });
        eval.preds = indexed.into_iter().map(|(_, p)| p).collect();
    }

    // AP per (bucket, threshold, category); bucket 0 is "all".
    let buckets: [(F, F); 4] = {
        let inf = F::infinity();
        [
            (F::zero(), inf),
            (real(AREA_BRACKETS[0].1), real(AREA_BRACKETS[0].2)),
            (real(AREA_BRACKETS[1].1), real(AREA_BRACKETS[1].2)),
            (real(AREA_BRACKETS[2].1), F::infinity()),
        ]
    };
    let mut ap_table: Vec<Vec<BTreeMap<u64, Option<F>>>> = Vec::with_capacity(4);
    for (lo, hi) in buckets {
        let mut per_threshold = Vec::with_capacity(thresholds.len());
        for &t in thresholds {
            let mut per_cat = BTreeMap::new();
            for (&cat, eval) in &evals {
                per_cat.insert(cat, category_ap(eval, t, lo, hi));
            }
            per_threshold.push(per_cat);
        }
        ap_table.push(per_threshold);
    }

    let per_threshold: Vec<ThresholdAp<F>> = thresholds
        .iter()
        .enumerate()
        .map(|(ti, &t)| {
            let vals: Vec<F> = ap_table[0][ti].values().filter_map(|v| *v).collect();
            ThresholdAp {
                threshold: t,
                ap: mean(&vals).unwrap_or(F::zero()),
            }
        })
        .collect();
    let map = mean(&per_threshold.iter().map(|x| x.ap).collect::<Vec<F>>()).unwrap_or(F::zero());

    let per_category: BTreeMap<u64, F> = categories
        .iter()
        .map(|&c| {
            let vals: Vec<F> = (0..thresholds.len())
                .filter_map(|ti| ap_table[0][ti][&c])
                .collect();
            (c, mean(&vals).unwrap_or(F::zero()))
        })
        .collect();

    let by_size: Vec<SizeBucketAp<F>> = AREA_BRACKETS
        .iter()
        .enumerate()
        .map(|(bi, (name, _, _))| {
            let vals: Vec<F> = ap_table[bi + 1]
                .iter()
                .flat_map(|per_cat| per_cat.values())
                .filter_map(|v| *v)
                .collect();
            SizeBucketAp {
                bucket: name,
                ap: mean(&vals),
            }
        })
        .collect();

    Ok(ApResult {
        map,
        per_threshold,
        per_category,
        by_size,
        unknown_category_ids,
    })
}

fn mean<F: Real>(values: &[F]) -> Option<F> {
    if values.is_empty() {
        return None;
    }
    let sum = values.iter().fold(F::zero(), |a, &v| a + v);
    Some(sum / real::<F>(values.len() as f64))
}

/// AP for one category at one threshold within one area bracket, or `None`
/// when the bracket holds no ground truth for the category.
fn category_ap<F: Real>(eval: &CategoryEval<F>, threshold: F, lo: F, hi: F) -> Option<F> {
    let in_bracket = |area: F| area >= lo && area < hi;
    let total_gt: usize = eval
        .gts
        .values()
        .flatten()
        .filter(|g| in_bracket(g.bbox.area()))
        .count();
    if total_gt == 0 {
        return None;
    }

    let mut matched: HashMap<u64, Vec<bool>> = eval
        .gts
        .iter()
        .map(|(&img, gts)| (img, vec![false; gts.len()]))
        .collect();
    // true = TP, false = FP, skipped predictions are ignored entirely.
    let mut outcomes: Vec<bool> = Vec::with_capacity(eval.preds.len());
    for p in &eval.preds {
        let gts = eval.gts.get(&p.image_id);
        let mut best: Option<(usize, F)> = None;
        if let Some(gts) = gts {
            let flags = &matched[&p.image_id];
            for (k, g) in gts.iter().enumerate() {
                if flags[k] || !in_bracket(g.bbox.area()) {
                    continue;
                }
                let iou = p.bbox.iou(&g.bbox);
                if iou < threshold {
                    continue;
                }
                // Strict > keeps the first (smallest-id) ground truth on ties.
                if best.is_none_or(|(_, b)| iou > b) {
                    best = Some((k, iou));
                }
            }
        }
        match best {
            Some((k, _)) => {
                matched.get_mut(&p.image_id).unwrap()[k] = true;
                outcomes.push(true);
            }
            None => {
                if in_bracket(p.bbox.area()) {
                    outcomes.push(false);
                }
            }
        }
    }

    Some(interpolated_ap(&outcomes, total_gt))
}

/// 101-point interpolated AP from ranked TP/FP outcomes.
fn interpolated_ap<F: Real>(outcomes: &[bool], total_gt: usize) -> F {
    if outcomes.is_empty() {
        return F::zero();
    }
    let mut tp = 0usize;
    let mut recalls = Vec::with_capacity(outcomes.len());
    let mut precisions = Vec::with_capacity(outcomes.len());
    for (i, &is_tp) in outcomes.iter().enumerate() {
        if is_tp {
            tp += 1;
        }
        recalls.push(real::<F>(tp as f64 / total_gt as f64));
        precisions.push(real::<F>(tp as f64 / (i + 1) as f64));
    }
    // Precision envelope: best precision achievable at or beyond each rank.
    let mut envelope = precisions.clone();
    for i in (0..envelope.len().saturating_sub(1)).rev() {
        envelope[i] = envelope[i].max(envelope[i + 1]);
    }
    let mut sum = F::zero();
    let mut idx = 0usize;
    for j in 0..=100u32 {
        let r = real::<F>(j as f64 / 100.0);
        while idx < recalls.len() && recalls[idx] < r {
            idx += 1;
        }
        if idx < recalls.len() {
            sum = sum + envelope[idx];
        }
    }
    sum / real::<F>(101.0)
}
