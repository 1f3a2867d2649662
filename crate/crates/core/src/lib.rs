//! Controlled bounding-box annotation noise and its correction.
//!
//! This crate synthesizes location noise for object-detection annotations,
//! corrects noisy boxes by fusing them with an ensemble of detector
//! predictions, and measures the damage and the repair: per-boundary error
//! statistics, error correlations, scale scatter, and COCO-style average
//! precision.
//!
//! All numeric types are generic over a [`Real`] scalar (`f32` or `f64`).
//! The aliases at the crate root pin `f64`, the precision used by file I/O
//! and the CLI.

pub mod coco;
pub mod corrector;
pub mod error;
pub mod geometry;
pub mod metrics;
pub mod noise;
pub mod real;
pub mod seeding;
pub mod simulator;
pub mod types;

pub use error::{Error, Result};
pub use real::Real;

/// `f64` bounding box.
pub type BBox = geometry::BBox<f64>;
/// `f64` annotated instance.
pub type Instance = types::Instance<f64>;
/// `f64` detector prediction.
pub type Prediction = types::Prediction<f64>;
/// `f64` noise model.
pub type NoiseModel = noise::NoiseModel<f64>;
/// `f64` ensemble weight function.
pub type WeightFn = corrector::WeightFn<f64>;
/// `f64` correction configuration.
pub type CorrectionConfig = corrector::CorrectionConfig<f64>;
/// `f64` Kalman estimator state.
pub type KalmanState = corrector::kalman::KalmanState<f64>;
/// `f64` teacher-simulation configuration.
pub type SimConfig = simulator::SimConfig<f64>;
/// `f64` prediction score law.
pub type ScoreLaw = simulator::ScoreLaw<f64>;
/// `f64` synthetic dataset configuration.
pub type SyntheticConfig = simulator::SyntheticConfig<f64>;
