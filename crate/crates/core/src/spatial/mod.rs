//! Rectangular search space, cosine basis, target distributions and their
//! Fourier coefficients.

mod basis;
pub mod io;
mod target;

pub use basis::{BasisSet, BasisWorkspace, ModeIndex};
pub use target::{
    reconstruct, sample_gmm, target_coefficients, GaussianMixture, GridDensity, TargetDistribution,
    DEFAULT_QUADRATURE_CELLS,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Axis-aligned box `[0, L_1] × … × [0, L_d]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace<T> {
    lengths: Vec<T>,
}

impl<T: Scalar> SearchSpace<T> {
    pub fn new(lengths: Vec<T>) -> Result<Self> {
        if !(2..=3).contains(&lengths.len()) {
            return Err(Error::InvalidSpace(format!(
                "only 2-D and 3-D spaces are supported, got {} dims",
                lengths.len()
            )));
        }
        if let Some(l) = lengths.iter().find(|l| !(l.is_finite() && **l > T::zero())) {
            return Err(Error::InvalidSpace(format!("side length {l} must be positive and finite")));
        }
        Ok(Self { lengths })
    }

    pub fn unit_square() -> Self {
        Self { lengths: vec![T::one(), T::one()] }
    }

    pub fn dims(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[T] {
        &self.lengths
    }

    pub fn volume(&self) -> T {
        self.lengths.iter().fold(T::one(), |acc, &l| acc * l)
    }

    pub fn min_length(&self) -> T {
        self.lengths.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.iter().zip(&self.lengths).all(|(&v, &l)| v >= T::zero() && v <= l)
    }

    /// Component-wise clamp into the box.
    pub fn clamp(&self, x: &mut [T]) {
        for (v, &l) in x.iter_mut().zip(&self.lengths) {
            *v = v.max(T::zero()).min(l);
        }
    }
}
