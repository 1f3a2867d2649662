use std::fmt::Debug;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

/// Scalar type for all geometry and estimation math: `f32` or `f64`.
///
/// Extends [`num_traits::Float`] with draws from the standard distributions
/// the noise models are built on, so generic code can sample without
/// spelling out `rand_distr` bounds at every call site.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + Debug
    + Default
    + Send
    + Sync
    + 'static
{
    /// One draw from the standard normal distribution.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// One draw from the unit-rate exponential distribution.
    fn standard_exp<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl Real for f32 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    fn standard_exp<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Exp1.sample(rng)
    }
}

impl Real for f64 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    fn standard_exp<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Exp1.sample(rng)
    }
}

/// Converts an `f64` constant into `F`, panicking only if the scalar type
/// cannot represent ordinary finite constants (neither f32 nor f64 can fail).
pub(crate) fn real<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("finite constant must convert to the scalar type")
}
