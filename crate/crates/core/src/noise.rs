//! Controlled corruption of box annotations.
//!
//! Each boundary of a clean box is displaced independently. Offsets scale
//! with the box extent on that axis (width for `l`/`r`, height for `t`/`b`),
//! so the noise level `gamma` is the root-mean-square of the *relative*
//! boundary errors regardless of object size:
//!
//! * `GaussianSymmetric`: zero-mean normal offsets with standard deviation
//!   `gamma * extent`.
//! * `ExponentialEnclosing`: one-sided exponential offsets pushing every
//!   boundary outward; the noisy box always contains the clean one. The
//!   relative rate is `sqrt(2) / gamma`, which makes the RMS relative error
//!   equal `gamma`.
//! * `ExponentialEnclosed`: the mirror image; boundaries move inward and the
//!   noisy box is contained in the clean one (up to the degeneracy clamp).
//!
//! `gamma = 0` disables corruption exactly for every variant.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::real::{real, Real};
use crate::seeding::stream_rng;
use crate::types::Instance;

/// A boundary-noise law with its level `gamma` (RMS relative error).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NoiseModel<F> {
    /// Symmetric Gaussian offsets on all four boundaries.
    Gaussian { gamma: F },
    /// Outward exponential offsets; the noisy box encloses the clean box.
    ExpEnclosing { gamma: F },
    /// Inward exponential offsets; the noisy box is enclosed by the clean box.
    ExpEnclosed { gamma: F },
}

impl<F: Real> NoiseModel<F> {
    pub fn gamma(&self) -> F {
        match *self {
            NoiseModel::Gaussian { gamma }
            | NoiseModel::ExpEnclosing { gamma }
            | NoiseModel::ExpEnclosed { gamma } => gamma,
        }
    }

    /// Rejects negative or non-finite noise levels.
    pub fn validate(&self) -> Result<()> {
        let g = self.gamma();
        if !g.is_finite() || g < F::zero() {
            return Err(Error::InvalidConfig(format!(
                "noise level gamma must be finite and non-negative, got {:?}",
                g
            )));
        }
        Ok(())
    }
}

/// A corrupted box plus whether the degeneracy clamp fired.
#[derive(Debug, Clone, Copy)]
pub struct NoisyBox<F> {
    pub bbox: BBox<F>,
    pub clamped: bool,
}

/// Repairs an inverted corner pair: both offending boundaries collapse to
/// their common midpoint and are pushed half a pixel apart, leaving a
/// one-pixel extent. Returns the repaired box and whether any pair was
/// clamped.
pub fn sanitize_corners<F: Real>(l: F, t: F, r: F, b: F) -> (BBox<F>, bool) {
    let half = real::<F>(0.5);
    let (l, r, cx) = if l > r {
        let m = (l + r) * half;
        (m - half, m + half, true)
    } else {
        (l, r, false)
    };
    let (t, b, cy) = if t > b {
        let m = (t + b) * half;
        (m - half, m + half, true)
    } else {
        (t, b, false)
    };
    let bbox = BBox::new(l, t, r, b).expect("sanitized corners are ordered and finite");
    (bbox, cx || cy)
}

/// Draws one noisy version of `clean`. The clean box must have positive
/// width and height; offsets scale with those extents.
pub fn corrupt_box<F: Real, R: Rng + ?Sized>(
    clean: &BBox<F>,
    model: &NoiseModel<F>,
    rng: &mut R,
) -> Result<NoisyBox<F>> {
    model.validate()?;
    let w = clean.width();
    let h = clean.height();
    if w <= F::zero() || h <= F::zero() {
        return Err(Error::InvalidSize {
            reason: "clean box must have positive width and height",
            w: w.to_f64().unwrap_or(f64::NAN),
            h: h.to_f64().unwrap_or(f64::NAN),
        });
    }
    let gamma = model.gamma();
    if gamma == F::zero() {
        return Ok(NoisyBox {
            bbox: *clean,
            clamped: false,
        });
    }
    let [l, t, r, b] = clean.corners();
    // Draw order is fixed (l, r, t, b) so a given rng state always yields
    // the same box.
    let (nl, nt, nr, nb) = match model {
        NoiseModel::Gaussian { .. } => {
            let dl = F::standard_normal(rng) * gamma * w;
            let dr = F::standard_normal(rng) * gamma * w;
            let dt = F::standard_normal(rng) * gamma * h;
            let db = F::standard_normal(rng) * gamma * h;
            (l + dl, t + dt, r + dr, b + db)
        }
        NoiseModel::ExpEnclosing { .. } => {
            let scale = gamma / real::<F>(std::f64::consts::SQRT_2);
            let dl = F::standard_exp(rng) * scale * w;
            let dr = F::standard_exp(rng) * scale * w;
            let dt = F::standard_exp(rng) * scale * h;
            let db = F::standard_exp(rng) * scale * h;
            (l - dl, t - dt, r + dr, b + db)
        }
        NoiseModel::ExpEnclosed { .. } => {
            let scale = gamma / real::<F>(std::f64::consts::SQRT_2);
            let dl = F::standard_exp(rng) * scale * w;
            let dr = F::standard_exp(rng) * scale * w;
            let dt = F::standard_exp(rng) * scale * h;
            let db = F::standard_exp(rng) * scale * h;
            (l + dl, t + dt, r - dr, b - db)
        }
    };
    let (bbox, clamped) = sanitize_corners(nl, nt, nr, nb);
    Ok(NoisyBox { bbox, clamped })
}

/// A corrupted dataset plus how many boxes needed the degeneracy clamp.
#[derive(Debug, Clone)]
pub struct CorruptedDataset<F> {
    pub instances: Vec<Instance<F>>,
    pub clamp_count: usize,
}

/// Corrupts every instance. Each instance draws from its own RNG seeded by
/// (`master_seed`, instance id), so results do not depend on list order or
/// parallel scheduling. Per-instance failures carry the instance id.
pub fn corrupt_dataset<F: Real>(
    instances: &[Instance<F>],
    model: &NoiseModel<F>,
    master_seed: u64,
) -> Result<CorruptedDataset<F>> {
    model.validate()?;
    let master = crate::seeding::derive_seed(master_seed, crate::seeding::DOMAIN_CORRUPT);
    let corrupted: Vec<(Instance<F>, bool)> = instances
        .par_iter()
        .map(|inst| {
            let mut rng = stream_rng(master, inst.id);
            let noisy = corrupt_box(&inst.bbox, model, &mut rng).map_err(|e| Error::Instance {
                id: inst.id,
                source: Box::new(e),
            })?;
            Ok((
                Instance {
                    bbox: noisy.bbox,
                    ..inst.clone()
                },
                noisy.clamped,
            ))
        })
        .collect::<Result<_>>()?;
    let clamp_count = corrupted.iter().filter(|(_, c)| *c).count();
    Ok(CorruptedDataset {
        instances: corrupted.into_iter().map(|(i, _)| i).collect(),
        clamp_count,
    })
}

/// Root-mean-square of a set of relative boundary errors: the empirical
/// noise level `gamma`.
pub fn estimate_noise_level<F: Real>(relative_errors: &[F]) -> Result<F> {
    if relative_errors.is_empty() {
        return Err(Error::EmptyInput("relative errors"));
    }
    let n = real::<F>(relative_errors.len() as f64);
    let sum_sq = relative_errors
        .iter()
        .fold(F::zero(), |acc, &e| acc + e * e);
    Ok((sum_sq / n).sqrt())
}
