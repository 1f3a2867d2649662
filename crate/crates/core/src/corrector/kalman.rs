//! Matrix form of the box-correction estimator.
//!
//! A box is a 4-vector `[l, t, r, b]` with a 4x4 covariance. For a static
//! quantity observed repeatedly, the measurement update is
//!
//! ```text
//! K_k = P_{k-1} (P_{k-1} + R_k)^-1
//! m_k = m_{k-1} + K_k (z_k - m_{k-1})
//! P_k = (I - K_k) P_{k-1}
//! ```
//!
//! Folding all measurements at once gives the equivalent information form
//!
//! ```text
//! P_k^-1 = P_0^-1 + sum(R_i^-1)
//! m_k    = P_k (P_0^-1 m_0 + sum(R_i^-1 z_i))
//! ```
//!
//! which is independent of measurement order. When every `R_i` is the prior
//! covariance scaled by `1/delta_i`, the posterior mean reduces to the
//! per-boundary scalar rule in the parent module.

use nalgebra::{Matrix4, RealField, Vector4};
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::noise::sanitize_corners;
use crate::real::{real, Real};

/// Mean and covariance of a box estimate. Construction validates that the
/// covariance is symmetric positive semi-definite.
#[derive(Debug, Clone, PartialEq)]
pub struct KalmanState<F> {
    mean: Vector4<F>,
    cov: Matrix4<F>,
}

impl<F: Real + RealField> KalmanState<F> {
    pub fn new(mean: Vector4<F>, cov: Matrix4<F>) -> Result<Self> {
        if mean.iter().any(|v| !Float::is_finite(*v)) {
            return Err(Error::NotPsd("state mean must be finite"));
        }
        check_symmetric_psd(&cov)?;
        Ok(KalmanState { mean, cov })
    }

    /// Prior state for an annotation box with a given covariance.
    pub fn from_box(bbox: &BBox<F>, cov: Matrix4<F>) -> Result<Self> {
        Self::new(Vector4::from(bbox.corners()), cov)
    }

    pub fn mean(&self) -> &Vector4<F> {
        &self.mean
    }

    pub fn cov(&self) -> &Matrix4<F> {
        &self.cov
    }

    /// The mean as a box, repaired by the degeneracy clamp if inverted.
    pub fn mean_box(&self) -> BBox<F> {
        let [l, t, r, b] = [self.mean[0], self.mean[1], self.mean[2], self.mean[3]];
        sanitize_corners(l, t, r, b).0
    }
}

/// Symmetry/PSD tolerance: the fixed 1e-9 bound, floored by machine
/// precision at the matrix's own scale so f32 states remain constructible.
fn psd_tolerance<F: Real + RealField>(m: &Matrix4<F>) -> F {
    let scale = m
        .iter()
        .fold(F::zero(), |acc, v| Float::max(acc, Float::abs(*v)));
    Float::max(real(1e-9), F::epsilon() * real(100.0) * scale)
}

fn check_symmetric_psd<F: Real + RealField>(m: &Matrix4<F>) -> Result<()> {
    if m.iter().any(|v| !Float::is_finite(*v)) {
        return Err(Error::NotPsd("covariance must be finite"));
    }
    let tol = psd_tolerance(m);
    for i in 0..4 {
        for j in (i + 1)..4 {
            if Float::abs(m[(i, j)] - m[(j, i)]) > tol {
                return Err(Error::NotPsd("covariance must be symmetric"));
            }
        }
    }
    let min_eig = m
        .symmetric_eigenvalues()
        .iter()
        .fold(F::infinity(), |acc, v| Float::min(acc, *v));
    if min_eig < -tol {
        return Err(Error::NotPsd("covariance has a negative eigenvalue"));
    }
    Ok(())
}

/// Inverts a PSD matrix, adding `eps * I` (eps = 1e-12, floored by machine
/// precision at the matrix's scale) when the eigenvalue condition number
/// exceeds 1e12.
fn invert_psd<F: Real + RealField>(m: &Matrix4<F>, what: &'static str) -> Result<Matrix4<F>> {
    let eig = m.symmetric_eigenvalues();
    let max_eig = eig.iter().fold(F::zero(), |acc, v| Float::max(acc, *v));
    let min_eig = eig.iter().fold(F::infinity(), |acc, v| Float::min(acc, *v));
    let well_conditioned = min_eig > F::zero() && max_eig / min_eig <= real(1e12);
    let target = if well_conditioned {
        *m
    } else {
        let eps = Float::max(real(1e-12), F::epsilon() * real(100.0) * max_eig);
        m + Matrix4::identity() * eps
    };
    let inv = target.try_inverse().ok_or(Error::Singular(what))?;
    if inv.iter().any(|v| !Float::is_finite(*v)) {
        return Err(Error::Singular(what));
    }
    Ok(inv)
}

fn symmetrize<F: Real + RealField>(m: &Matrix4<F>) -> Matrix4<F> {
    (m + m.transpose()) * real::<F>(0.5)
}

/// One measurement update. `measurement_cov` must be symmetric PSD.
pub fn kalman_update<F: Real + RealField>(
    state: &KalmanState<F>,
    measurement_mean: &Vector4<F>,
    measurement_cov: &Matrix4<F>,
) -> Result<KalmanState<F>> {
    if measurement_mean.iter().any(|v| !Float::is_finite(*v)) {
        return Err(Error::NotPsd("measurement mean must be finite"));
    }
    check_symmetric_psd(measurement_cov)?;
    let innovation_cov = state.cov + measurement_cov;
    let gain = state.cov * invert_psd(&innovation_cov, "innovation covariance")?;
    let mean = state.mean + gain * (measurement_mean - state.mean);
    let cov = symmetrize(&((Matrix4::identity() - gain) * state.cov));
    KalmanState::new(mean, cov)
}

/// Folds the prior and all measurements in one information-form step.
/// The result is identical (to rounding) for any measurement order.
pub fn posterior_batch<F: Real + RealField>(
    prior_mean: &Vector4<F>,
    prior_cov: &Matrix4<F>,
    measurements: &[(Vector4<F>, Matrix4<F>)],
) -> Result<KalmanState<F>> {
    let prior = KalmanState::new(*prior_mean, *prior_cov)?;
    if measurements.is_empty() {
        return Ok(prior);
    }
    let mut precision = invert_psd(prior_cov, "prior covariance")?;
    let mut info = precision * prior_mean;
    for (z, r) in measurements {
        if z.iter().any(|v| !Float::is_finite(*v)) {
            return Err(Error::NotPsd("measurement mean must be finite"));
        }
        check_symmetric_psd(r)?;
        let r_inv = invert_psd(r, "measurement covariance")?;
        precision += r_inv;
        info += r_inv * z;
    }
    let cov = symmetrize(&invert_psd(&precision, "accumulated precision")?);
    KalmanState::new(cov * info, cov)
}
