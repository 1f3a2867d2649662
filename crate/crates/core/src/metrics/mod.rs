//! Error analytics for pairs of annotation sets.
//!
//! A candidate set (noisy or corrected) is compared against a reference set
//! by instance id. Each boundary yields one sample holding the signed
//! absolute error and the error relative to the reference extent on that
//! axis (width for left/right, height for top/bottom), so relative errors
//! are directly comparable across object sizes.

pub mod ap;

pub use ap::{coco_thresholds, evaluate_ap, ApResult, SizeBucketAp, ThresholdAp};

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::{real, Real};
use crate::types::Instance;

/// The four box boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Left,
    Right,
    Top,
    Bottom,
}

pub const BOUNDARIES: [Boundary; 4] = [
    Boundary::Left,
    Boundary::Right,
    Boundary::Top,
    Boundary::Bottom,
];

impl Boundary {
    /// Lowercase name, matching the serialized form.
    pub fn name(self) -> &'static str {
        match self {
            Boundary::Left => "left",
            Boundary::Right => "right",
            Boundary::Top => "top",
            Boundary::Bottom => "bottom",
        }
    }
}

/// One boundary's deviation of a candidate box from its reference box.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ErrorSample<F> {
    pub instance_id: u64,
    pub boundary: Boundary,
    /// Signed error in pixels (candidate minus reference).
    pub absolute_error: F,
    /// Signed error divided by the reference extent on this axis.
    pub relative_error: F,
    /// Reference width for left/right samples, height for top/bottom.
    pub object_extent: F,
}

/// Compares candidate boxes to reference boxes, matched one-to-one by
/// instance id. Emits four samples per instance, in reference order with
/// boundaries ordered left, right, top, bottom. Reference boxes must have
/// positive extents; the id sets must coincide.
pub fn error_samples<F: Real>(
    reference: &[Instance<F>],
    candidate: &[Instance<F>],
) -> Result<Vec<ErrorSample<F>>> {
    let mut by_id: HashMap<u64, &Instance<F>> = HashMap::with_capacity(candidate.len());
    for inst in candidate {
        if by_id.insert(inst.id, inst).is_some() {
            return Err(Error::DuplicateId(format!(
                "candidate instance id {}",
                inst.id
            )));
        }
    }
    if reference.len() != candidate.len() {
        return Err(Error::IdMismatch(format!(
            "{} reference instances vs {} candidates",
            reference.len(),
            candidate.len()
        )));
    }
    let mut samples = Vec::with_capacity(reference.len() * 4);
    let mut seen = 0usize;
    for re in reference {
        let cand = by_id.get(&re.id).ok_or_else(|| {
            Error::IdMismatch(format!("instance id {} missing from candidate", re.id))
        })?;
        seen += 1;
        let w = re.bbox.width();
        let h = re.bbox.height();
        if w <= F::zero() || h <= F::zero() {
            return Err(Error::Instance {
                id: re.id,
                source: Box::new(Error::InvalidSize {
                    reason: "reference box must have positive extents",
                    w: w.to_f64().unwrap_or(f64::NAN),
                    h: h.to_f64().unwrap_or(f64::NAN),
                }),
            });
        }
        let pairs = [
            (Boundary::Left, cand.bbox.l() - re.bbox.l(), w),
            (Boundary::Right, cand.bbox.r() - re.bbox.r(), w),
            (Boundary::Top, cand.bbox.t() - re.bbox.t(), h),
            (Boundary::Bottom, cand.bbox.b() - re.bbox.b(), h),
        ];
        for (boundary, abs, extent) in pairs {
            samples.push(ErrorSample {
                instance_id: re.id,
                boundary,
                absolute_error: abs,
                relative_error: abs / extent,
                object_extent: extent,
            });
        }
    }
    debug_assert_eq!(seen, reference.len());
    Ok(samples)
}

/// Mean, sample standard deviation, and RMS of one boundary's relative
/// errors. The RMS is the empirical noise level for that boundary.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundaryStats<F> {
    pub mean: F,
    pub std: F,
    pub rms: F,
    pub count: usize,
}

/// A value per boundary.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PerBoundary<T> {
    pub left: T,
    pub right: T,
    pub top: T,
    pub bottom: T,
}

impl<T> PerBoundary<T> {
    pub fn get(&self, boundary: Boundary) -> &T {
        match boundary {
            Boundary::Left => &self.left,
            Boundary::Right => &self.right,
            Boundary::Top => &self.top,
            Boundary::Bottom => &self.bottom,
        }
    }
}

fn stats_of<F: Real>(values: &[F]) -> BoundaryStats<F> {
    let n = values.len();
    if n == 0 {
        return BoundaryStats {
            mean: F::zero(),
            std: F::zero(),
            rms: F::zero(),
            count: 0,
        };
    }
    let nf = real::<F>(n as f64);
    let mean = values.iter().fold(F::zero(), |a, &v| a + v) / nf;
    let sum_sq = values.iter().fold(F::zero(), |a, &v| a + v * v);
    let rms = (sum_sq / nf).sqrt();
    let std = if n < 2 {
        F::zero()
    } else {
        let centered = values
            .iter()
            .fold(F::zero(), |a, &v| a + (v - mean) * (v - mean));
        (centered / real::<F>((n - 1) as f64)).sqrt()
    };
    BoundaryStats {
        mean,
        std,
        rms,
        count: n,
    }
}

/// Per-boundary statistics of the relative errors in `samples`.
pub fn boundary_summary<F: Real>(samples: &[ErrorSample<F>]) -> PerBoundary<BoundaryStats<F>> {
    let collect = |b: Boundary| {
        let vals: Vec<F> = samples
            .iter()
            .filter(|s| s.boundary == b)
            .map(|s| s.relative_error)
            .collect();
        stats_of(&vals)
    };
    PerBoundary {
        left: collect(Boundary::Left),
        right: collect(Boundary::Right),
        top: collect(Boundary::Top),
        bottom: collect(Boundary::Bottom),
    }
}

/// Pearson correlations between the four boundaries' relative errors,
/// computed across instances. A boundary whose error series has zero
/// variance is flagged degenerate; its off-diagonal entries are 0 by
/// definition. The diagonal is exactly 1.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationMatrix<F> {
    pub coefficients: [[F; 4]; 4],
    pub degenerate: [bool; 4],
}

/// Builds the boundary-error correlation matrix. Needs at least two
/// instances carrying all four boundary samples.
pub fn correlation_matrix<F: Real>(samples: &[ErrorSample<F>]) -> Result<CorrelationMatrix<F>> {
    let mut per_instance: HashMap<u64, [Option<F>; 4]> = HashMap::new();
    for s in samples {
        let slot = per_instance.entry(s.instance_id).or_insert([None; 4]);
        let idx = BOUNDARIES.iter().position(|b| *b == s.boundary).unwrap();
        slot[idx] = Some(s.relative_error);
    }
    let mut rows: Vec<(u64, [F; 4])> = per_instance
        .into_iter()
        .filter_map(|(id, slots)| {
            let complete: Option<Vec<F>> = slots.into_iter().collect();
            complete.map(|v| (id, [v[0], v[1], v[2], v[3]]))
        })
        .collect();
    if rows.len() < 2 {
        return Err(Error::EmptyInput(
            "correlation needs at least two instances with all four boundaries",
        ));
    }
    rows.sort_by_key(|(id, _)| *id);

    let n = real::<F>(rows.len() as f64);
    let mut means = [F::zero(); 4];
    for (_, v) in &rows {
        for i in 0..4 {
            means[i] = means[i] + v[i];
        }
    }
    for m in &mut means {
        *m = *m / n;
    }
    let mut var = [F::zero(); 4];
    let mut cov = [[F::zero(); 4]; 4];
    for (_, v) in &rows {
        for i in 0..4 {
            let di = v[i] - means[i];
            var[i] = var[i] + di * di;
            for j in (i + 1)..4 {
                cov[i][j] = cov[i][j] + di * (v[j] - means[j]);
            }
        }
    }
    let degenerate = [
        var[0] == F::zero(),
        var[1] == F::zero(),
        var[2] == F::zero(),
        var[3] == F::zero(),
    ];
    let mut coefficients = [[F::zero(); 4]; 4];
    for i in 0..4 {
        coefficients[i][i] = F::one();
        for j in (i + 1)..4 {
            let r = if degenerate[i] || degenerate[j] {
                F::zero()
            } else {
                let r = cov[i][j] / (var[i].sqrt() * var[j].sqrt());
                r.max(-F::one()).min(F::one())
            };
            coefficients[i][j] = r;
            coefficients[j][i] = r;
        }
    }
    Ok(CorrelationMatrix {
        coefficients,
        degenerate,
    })
}

/// Raw (extent, signed absolute error) pairs and the least-squares slope of
/// |absolute error| against extent, constrained through the origin. Under
/// extent-proportional noise the slope estimates the mean absolute relative
/// error.
#[derive(Debug, Clone, Serialize)]
pub struct ScaleScatter<F> {
    pub points: Vec<(F, F)>,
    pub slope: F,
}

/// Builds the scale scatter for a set of samples.
pub fn scale_scatter<F: Real>(samples: &[ErrorSample<F>]) -> ScaleScatter<F> {
    let points: Vec<(F, F)> = samples
        .iter()
        .map(|s| (s.object_extent, s.absolute_error))
        .collect();
    let mut num = F::zero();
    let mut den = F::zero();
    for (x, e) in &points {
        num = num + *x * e.abs();
        den = den + *x * *x;
    }
    let slope = if den > F::zero() { num / den } else { F::zero() };
    ScaleScatter { points, slope }
}
