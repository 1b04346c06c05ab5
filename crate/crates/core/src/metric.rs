//! Trajectory Fourier coefficients, the ergodic metric and its state gradient.
//!
//! Everything here is written against [`FeatureMap`], which yields the
//! per-state basis values `f_k^v(s)` (volumetric) or `f_k(x(s))` (point).
//! Trajectory coefficients are time averages of those values over
//! equally spaced states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Scalar};

/// Coefficients aligned with a [`crate::spatial::BasisSet`] index list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector<T> {
    values: Vec<T>,
}

impl<T: Scalar> CoefficientVector<T> {
    pub fn new(values: Vec<T>) -> Self {
        Self { values }
    }

    pub fn zeros(len: usize) -> Self {
        Self { values: vec![T::zero(); len] }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn into_inner(self) -> Vec<T> {
        self.values
    }
}

/// Per-state basis values and their state gradients.
pub trait FeatureMap<T: Scalar>: Sync {
    /// Number of modes.
    fn num_features(&self) -> usize;

    /// Length of the state vectors consumed.
    fn state_dim(&self) -> usize;

    /// Writes `f_k(s)` for every mode into `out`.
    fn features(&self, s: &[T], out: &mut [T]) -> Result<()>;

    /// Writes values and the `num_features × state_dim` row-major gradient.
    fn features_with_grad(&self, s: &[T], values: &mut [T], grads: &mut [T]) -> Result<()>;
}

/// Executed or planned trajectory sampled at a fixed step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord<T> {
    pub states: Vec<Vec<T>>,
    pub controls: Vec<Vec<T>>,
    pub dt: T,
}

impl<T: Scalar> TrajectoryRecord<T> {
    pub fn new(states: Vec<Vec<T>>, controls: Vec<Vec<T>>, dt: T) -> Result<Self> {
        if !(dt > T::zero()) {
            return Err(Error::InvalidTrajectory("dt must be positive".into()));
        }
        if states.is_empty() {
            return Err(Error::InvalidTrajectory("at least one state required".into()));
        }
        if controls.len() + 1 != states.len() {
            return Err(Error::InvalidTrajectory(format!(
                "{} controls for {} states",
                controls.len(),
                states.len()
            )));
        }
        Ok(Self { states, controls, dt })
    }

    /// Total duration `T = count · dt`.
    pub fn duration(&self) -> T {
        T::from_usize_lossy(self.states.len()) * self.dt
    }
}

/// `c_k = (1/T) Σ_t f_k(s_t) dt`, i.e. the mean of the per-state values.
pub fn trajectory_coefficients<T: Scalar, F: FeatureMap<T> + ?Sized>(
    fm: &F,
    states: &[Vec<T>],
    dt: T,
) -> Result<CoefficientVector<T>> {
    if states.is_empty() {
        return Err(Error::InvalidTrajectory("at least one state required".into()));
    }
    if !(dt > T::zero()) {
        return Err(Error::InvalidTrajectory("dt must be positive".into()));
    }
    let k = fm.num_features();
    let mut acc = vec![CompensatedSum::new(); k];
    let mut buf = vec![T::zero(); k];
    for s in states {
        fm.features(s, &mut buf)?;
        for (a, &v) in acc.iter_mut().zip(&buf) {
            a.add(v * dt);
        }
    }
    let duration = T::from_usize_lossy(states.len()) * dt;
    if states.len() == 1 {
        return Ok(CoefficientVector::new(buf));
    }
    Ok(CoefficientVector::new(acc.iter().map(|a| a.value() / duration).collect()))
}

/// Duration-weighted average of the coefficients of two consecutive segments.
pub fn compose<T: Scalar>(
    a: &CoefficientVector<T>,
    duration_a: T,
    b: &CoefficientVector<T>,
    duration_b: T,
) -> Result<CoefficientVector<T>> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    let total = duration_a + duration_b;
    Ok(CoefficientVector::new(
        a.values.iter().zip(&b.values).map(|(&x, &y)| (duration_a * x + duration_b * y) / total).collect(),
    ))
}

/// `Σ_k λ_k (c_k − φ_k)²`.
pub fn ergodic_metric<T: Scalar>(c: &CoefficientVector<T>, phi: &CoefficientVector<T>, weights: &[T]) -> Result<T> {
    if c.len() != phi.len() {
        return Err(Error::DimensionMismatch { expected: phi.len(), got: c.len() });
    }
    if weights.len() != phi.len() {
        return Err(Error::DimensionMismatch { expected: phi.len(), got: weights.len() });
    }
    Ok(metric_from_values(c.values(), phi.values(), weights))
}

pub(crate) fn metric_from_values<T: Scalar>(c: &[T], phi: &[T], weights: &[T]) -> T {
    let mut acc = T::zero();
    for ((&ck, &pk), &w) in c.iter().zip(phi).zip(weights) {
        let e = ck - pk;
        acc += w * e * e;
    }
    acc
}

/// `∂E/∂s_t` for every `t ≥ horizon_start`; earlier states only enter the
/// coefficients.
pub fn metric_state_gradient<T: Scalar, F: FeatureMap<T> + ?Sized>(
    fm: &F,
    weights: &[T],
    states: &[Vec<T>],
    dt: T,
    phi: &CoefficientVector<T>,
    horizon_start: usize,
) -> Result<Vec<Vec<T>>> {
    if horizon_start >= states.len() {
        return Err(Error::InvalidTrajectory(format!(
            "horizon start {horizon_start} outside {} states",
            states.len()
        )));
    }
    let c = trajectory_coefficients(fm, states, dt)?;
    if c.len() != phi.len() || weights.len() != phi.len() {
        return Err(Error::DimensionMismatch { expected: phi.len(), got: c.len() });
    }
    let k = fm.num_features();
    let n = fm.state_dim();
    // dt / T = 1 / count
    let scale = T::one() / T::from_usize_lossy(states.len());
    let two = T::lit(2.0);
    let coef: Vec<T> =
        (0..k).map(|m| two * weights[m] * (c.values()[m] - phi.values()[m]) * scale).collect();
    let mut vals = vec![T::zero(); k];
    let mut grads = vec![T::zero(); k * n];
    let mut out = Vec::with_capacity(states.len() - horizon_start);
    for s in &states[horizon_start..] {
        fm.features_with_grad(s, &mut vals, &mut grads)?;
        out.push(contract_gradient(&coef, &grads, n));
    }
    Ok(out)
}

/// `Σ_k coef_k ∇f_k`, with `grads` row-major `k × n`.
pub(crate) fn contract_gradient<T: Scalar>(coef: &[T], grads: &[T], n: usize) -> Vec<T> {
    let mut g = vec![T::zero(); n];
    for (m, &a) in coef.iter().enumerate() {
        let row = &grads[m * n..(m + 1) * n];
        for (gi, &r) in g.iter_mut().zip(row) {
            *gi += a * r;
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two features of a scalar state: `s` and `s²`.
    struct Poly;

    impl FeatureMap<f64> for Poly {
        fn num_features(&self) -> usize {
            2
        }
        fn state_dim(&self) -> usize {
            1
        }
        fn features(&self, s: &[f64], out: &mut [f64]) -> Result<()> {
            out[0] = s[0];
            out[1] = s[0] * s[0];
            Ok(())
        }
        fn features_with_grad(&self, s: &[f64], values: &mut [f64], grads: &mut [f64]) -> Result<()> {
            self.features(s, values)?;
            grads[0] = 1.0;
            grads[1] = 2.0 * s[0];
            Ok(())
        }
    }

    #[test]
    fn metric_examples() {
        let phi = CoefficientVector::new(vec![0.3, -0.2]);
        assert_eq!(ergodic_metric(&phi, &phi, &[1.0, 0.5]).unwrap(), 0.0);
        let c = CoefficientVector::new(vec![1.0]);
        let p = CoefficientVector::new(vec![0.5]);
        assert_eq!(ergodic_metric(&c, &p, &[1.0]).unwrap(), 0.25);
        assert!(ergodic_metric(&c, &phi, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn single_state_coefficients() {
        let c = trajectory_coefficients(&Poly, &[vec![0.7]], 0.1).unwrap();
        assert_eq!(c.values(), &[0.7, 0.7 * 0.7]);
        assert!(trajectory_coefficients(&Poly, &[], 0.1).is_err());
    }

    #[test]
    fn trajectory_record_validation() {
        assert!(TrajectoryRecord::new(vec![vec![0.0]], vec![], 0.1).is_ok());
        assert!(TrajectoryRecord::new(vec![vec![0.0]], vec![vec![1.0]], 0.1).is_err());
        assert!(TrajectoryRecord::<f64>::new(vec![vec![0.0]], vec![], 0.0).is_err());
        let r = TrajectoryRecord::new(vec![vec![0.0], vec![1.0]], vec![vec![0.0]], 0.5).unwrap();
        assert_eq!(r.duration(), 1.0);
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let states = vec![vec![0.2], vec![-0.4], vec![0.9]];
        let phi = CoefficientVector::new(vec![0.1, 0.5]);
        let w = [1.0, 0.3];
        let g = metric_state_gradient(&Poly, &w, &states, 0.1, &phi, 1).unwrap();
        assert_eq!(g.len(), 2);
        for (j, t) in (1..3).enumerate() {
            let h = 1e-6;
            let mut p = states.clone();
            p[t][0] += h;
            let mut m = states.clone();
            m[t][0] -= h;
            let e = |s: &[Vec<f64>]| {
                ergodic_metric(&trajectory_coefficients(&Poly, s, 0.1).unwrap(), &phi, &w).unwrap()
            };
            let fd = (e(&p) - e(&m)) / (2.0 * h);
            assert!((g[j][0] - fd).abs() <= 1e-6 * fd.abs().max(1e-3), "{} vs {fd}", g[j][0]);
        }
        assert!(metric_state_gradient(&Poly, &w, &states, 0.1, &phi, 3).is_err());
    }

    #[test]
    fn compose_weighted_average() {
        let a = vec![vec![0.1], vec![0.4]];
        let b = vec![vec![-0.3], vec![0.8], vec![0.2]];
        let dt = 0.1;
        let ca = trajectory_coefficients(&Poly, &a, dt).unwrap();
        let cb = trajectory_coefficients(&Poly, &b, dt).unwrap();
        let all: Vec<_> = a.iter().chain(&b).cloned().collect();
        let cab = trajectory_coefficients(&Poly, &all, dt).unwrap();
        let composed = compose(&ca, 2.0 * dt, &cb, 3.0 * dt).unwrap();
        for (x, y) in cab.values().iter().zip(composed.values()) {
            assert!((x - y).abs() < 1e-15);
        }
    }
}
