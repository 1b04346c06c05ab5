//! Volumetric ergodic coverage control.
//!
//! The crate computes how well the time-averaged footprint of a robot (its
//! tool, LiDAR wedge or camera ground projection) matches a target spatial
//! distribution, measured in a truncated cosine basis, and drives that
//! discrepancy down with a receding-horizon iLQR controller. The point
//! footprint reduces everything to standard ergodic control, which is kept
//! as a dedicated code path in [`standard`] for ablations.
//!
//! The numeric core is generic over [`Scalar`] (`f32` / `f64`); the aliases
//! below fix it to `f64`, which is what the benchmark harness uses.

pub mod config;
pub mod control;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod metric;
pub mod scalar;
pub mod spatial;
pub mod standard;
pub mod tasks;
pub mod volumetric;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type SearchSpace = spatial::SearchSpace<f64>;
pub type BasisSet = spatial::BasisSet<f64>;
pub type TargetDistribution = spatial::TargetDistribution<f64>;
pub type GaussianMixture = spatial::GaussianMixture<f64>;
pub type GridDensity = spatial::GridDensity<f64>;
pub type CoefficientVector = metric::CoefficientVector<f64>;
pub type TrajectoryRecord = metric::TrajectoryRecord<f64>;
pub type DynamicsModel = dynamics::DynamicsModel<f64>;
pub type VolumetricModel = volumetric::VolumetricModel<f64>;
pub type ControllerConfig = control::ControllerConfig<f64>;
pub type ControllerMemory = control::ControllerMemory<f64>;


