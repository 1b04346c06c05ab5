//! Standard (point-based) ergodic control path.
//!
//! The robot is reduced to its position; coefficients are time averages of
//! `f_k` along the position trajectory. This is written independently of
//! [`crate::volumetric`] so that the point footprint can be checked against
//! it.

use crate::dynamics::DynamicsModel;
use crate::error::{Error, Result};
use crate::metric::{ergodic_metric, trajectory_coefficients, CoefficientVector, FeatureMap};
use crate::scalar::Scalar;
use crate::spatial::{BasisSet, BasisWorkspace};

/// `f_k(x(s))` for every mode, `x(s)` being the robot position.
#[derive(Debug, Clone, Copy)]
pub struct PointFeatures<'a, T> {
    basis: &'a BasisSet<T>,
    dynamics: &'a DynamicsModel<T>,
}

impl<'a, T: Scalar> PointFeatures<'a, T> {
    pub fn new(basis: &'a BasisSet<T>, dynamics: &'a DynamicsModel<T>) -> Result<Self> {
        if dynamics.position_indices().len() < basis.dims() {
            return Err(Error::InvalidModel(format!(
                "{} has no {}-D position",
                dynamics.platform(),
                basis.dims()
            )));
        }
        Ok(Self { basis, dynamics })
    }

    fn position(&self, s: &[T]) -> Result<Vec<T>> {
        if s.len() != self.dynamics.state_dim() {
            return Err(Error::DimensionMismatch { expected: self.dynamics.state_dim(), got: s.len() });
        }
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("state"));
        }
        Ok(self.dynamics.position_indices()[..self.basis.dims()].iter().map(|&i| s[i]).collect())
    }
}

impl<T: Scalar> FeatureMap<T> for PointFeatures<'_, T> {
    fn num_features(&self) -> usize {
        self.basis.len()
    }

    fn state_dim(&self) -> usize {
        self.dynamics.state_dim()
    }

    fn features(&self, s: &[T], out: &mut [T]) -> Result<()> {
        let x = self.position(s)?;
        let mut ws = BasisWorkspace::new(self.basis);
        self.basis.eval_all_into(&mut ws, &x, out);
        Ok(())
    }

    fn features_with_grad(&self, s: &[T], values: &mut [T], grads: &mut [T]) -> Result<()> {
        let x = self.position(s)?;
        let d = self.basis.dims();
        let n = self.dynamics.state_dim();
        let mut ws = BasisWorkspace::new(self.basis);
        let mut gx = vec![T::zero(); self.basis.len() * d];
        self.basis.eval_all_with_grad_into(&mut ws, &x, values, &mut gx);
        grads.iter_mut().for_each(|g| *g = T::zero());
        let cols = &self.dynamics.position_indices()[..d];
        for m in 0..self.basis.len() {
            for (r, &col) in cols.iter().enumerate() {
                grads[m * n + col] += gx[m * d + r];
            }
        }
        Ok(())
    }
}

/// `c_k = (1/T) ∫ f_k(x(t)) dt` over the position trajectory.
pub fn coefficients<T: Scalar>(
    basis: &BasisSet<T>,
    dynamics: &DynamicsModel<T>,
    states: &[Vec<T>],
    dt: T,
) -> Result<CoefficientVector<T>> {
    trajectory_coefficients(&PointFeatures::new(basis, dynamics)?, states, dt)
}

/// Standard ergodic metric of a state trajectory.
pub fn metric<T: Scalar>(
    basis: &BasisSet<T>,
    dynamics: &DynamicsModel<T>,
    states: &[Vec<T>],
    dt: T,
    phi: &CoefficientVector<T>,
) -> Result<T> {
    ergodic_metric(&coefficients(basis, dynamics, states, dt)?, phi, basis.weights())
}
