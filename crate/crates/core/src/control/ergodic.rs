//! Ergodic trajectory cost over a planning horizon appended to executed history.

use nalgebra::{DMatrix, DVector};

use super::ilqr::{CostExpansion, TrajectoryProblem};
use crate::dynamics::{wrap_angle, DynamicsModel, Platform};
use crate::error::{Error, Result};
use crate::metric::{metric_from_values, FeatureMap};
use crate::scalar::Scalar;

/// Quadratic penalty keeping selected state components inside `[lower, upper]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxPenalty<T> {
    pub indices: Vec<usize>,
    pub lower: Vec<T>,
    pub upper: Vec<T>,
    pub weight: T,
}

impl<T: Scalar> BoxPenalty<T> {
    pub fn value(&self, s: &[T]) -> T {
        let mut acc = T::zero();
        for ((&i, &lo), &hi) in self.indices.iter().zip(&self.lower).zip(&self.upper) {
            let v = s[i];
            if v < lo {
                acc += (lo - v) * (lo - v);
            } else if v > hi {
                acc += (v - hi) * (v - hi);
            }
        }
        self.weight * acc
    }

    fn add_derivatives(&self, s: &[T], g: &mut DVector<T>, h: &mut DMatrix<T>) {
        let two = T::lit(2.0) * self.weight;
        for ((&i, &lo), &hi) in self.indices.iter().zip(&self.lower).zip(&self.upper) {
            let v = s[i];
            if v < lo {
                g[i] += two * (v - lo);
                h[(i, i)] += two;
            } else if v > hi {
                g[i] += two * (v - hi);
                h[(i, i)] += two;
            }
        }
    }
}

/// `J = E(past ⊕ horizon) + Σ_t (u_t − ū)ᵀ R (u_t − ū) dt + Σ_t penalty(s_t)`.
///
/// The executed history enters only through its running mean of basis
/// values and its length; the horizon's first state is the current state,
/// which is fixed.
pub struct ErgodicProblem<'a, T: Scalar, F: FeatureMap<T>> {
    pub features: &'a F,
    pub weights: &'a [T],
    pub phi: &'a [T],
    pub dynamics: &'a DynamicsModel<T>,
    pub dt: T,
    pub control_weight: &'a [T],
    pub penalty: Option<BoxPenalty<T>>,
    /// Σ over executed states and the current state of the basis values.
    fixed_sum: Vec<T>,
    fixed_count: usize,
}

impl<'a, T: Scalar, F: FeatureMap<T>> ErgodicProblem<'a, T, F> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        features: &'a F,
        weights: &'a [T],
        phi: &'a [T],
        dynamics: &'a DynamicsModel<T>,
        dt: T,
        control_weight: &'a [T],
        penalty: Option<BoxPenalty<T>>,
        past_mean: &[T],
        past_count: usize,
        s_now: &[T],
    ) -> Result<Self> {
        let k = features.num_features();
        if weights.len() != k || phi.len() != k || past_mean.len() != k {
            return Err(Error::DimensionMismatch { expected: k, got: phi.len() });
        }
        if control_weight.len() != dynamics.control_dim() {
            return Err(Error::DimensionMismatch { expected: dynamics.control_dim(), got: control_weight.len() });
        }
        let mut now = vec![T::zero(); k];
        features.features(s_now, &mut now)?;
        let pc = T::from_usize_lossy(past_count);
        let fixed_sum = past_mean.iter().zip(&now).map(|(&m, &f)| m * pc + f).collect();
        Ok(Self {
            features,
            weights,
            phi,
            dynamics,
            dt,
            control_weight,
            penalty,
            fixed_sum,
            fixed_count: past_count + 1,
        })
    }

    fn total_count(&self, horizon_states: usize) -> T {
        T::from_usize_lossy(self.fixed_count + horizon_states)
    }

    fn control_cost(&self, u: &[T]) -> T {
        let nominal = self.dynamics.nominal_control();
        let mut acc = T::zero();
        for ((&v, &r), &n) in u.iter().zip(self.control_weight).zip(nominal) {
            acc += r * (v - n) * (v - n);
        }
        acc * self.dt
    }

    /// Coefficients of the composed trajectory.
    pub fn coefficients(&self, states: &[Vec<T>]) -> Result<Vec<T>> {
        let k = self.features.num_features();
        let mut sum = self.fixed_sum.clone();
        let mut buf = vec![T::zero(); k];
        for s in &states[1..] {
            self.features.features(s, &mut buf)?;
            for (a, &v) in sum.iter_mut().zip(&buf) {
                *a += v;
            }
        }
        let total = self.total_count(states.len() - 1);
        Ok(sum.into_iter().map(|v| v / total).collect())
    }

    pub fn ergodic_term(&self, states: &[Vec<T>]) -> Result<T> {
        Ok(metric_from_values(&self.coefficients(states)?, self.phi, self.weights))
    }
}

impl<T: Scalar, F: FeatureMap<T>> TrajectoryProblem<T> for ErgodicProblem<'_, T, F> {
    fn state_dim(&self) -> usize {
        self.dynamics.state_dim()
    }

    fn control_dim(&self) -> usize {
        self.dynamics.control_dim()
    }

    fn step(&self, s: &[T], u: &[T]) -> Result<Vec<T>> {
        self.dynamics.step_rk4(s, u, self.dt)
    }

    fn admissible_control(&self, u: &[T]) -> Vec<T> {
        self.dynamics.clamp_control(u)
    }

    fn linearize(&self, s: &[T], u: &[T]) -> Result<(DMatrix<T>, DMatrix<T>)> {
        match self.dynamics.linearize_analytic(self.dt) {
            Some(ab) => Ok(ab),
            None => self.dynamics.linearize(s, u, self.dt),
        }
    }

    fn cost(&self, states: &[Vec<T>], controls: &[Vec<T>]) -> Result<T> {
        let mut j = self.ergodic_term(states)?;
        for u in controls {
            j += self.control_cost(u);
        }
        if let Some(p) = &self.penalty {
            for s in &states[1..] {
                j += p.value(s);
            }
        }
        Ok(j)
    }

    fn expand(&self, states: &[Vec<T>], controls: &[Vec<T>]) -> Result<CostExpansion<T>> {
        let k = self.features.num_features();
        let n = self.state_dim();
        let m = self.control_dim();
        let h = controls.len();
        let mut values = vec![vec![T::zero(); k]; h + 1];
        let mut grads = vec![vec![T::zero(); k * n]; h + 1];
        let mut sum = self.fixed_sum.clone();
        for t in 1..=h {
            self.features.features_with_grad(&states[t], &mut values[t], &mut grads[t])?;
            for (a, &v) in sum.iter_mut().zip(&values[t]) {
                *a += v;
            }
        }
        let total = self.total_count(h);
        let two = T::lit(2.0);
        // ∂E/∂f_k(s_t) = 2 λ_k (c_k − φ_k) / count ; Gauss-Newton curvature 2 λ_k / count²
        let coef: Vec<T> =
            (0..k).map(|i| two * self.weights[i] * (sum[i] / total - self.phi[i]) / total).collect();
        let curv: Vec<T> = (0..k).map(|i| two * self.weights[i] / (total * total)).collect();

        let mut lx = vec![DVector::zeros(n); h + 1];
        let mut lxx = vec![DMatrix::zeros(n, n); h + 1];
        for t in 1..=h {
            let g = &grads[t];
            let mut gx = DVector::<T>::zeros(n);
            let mut hx = DMatrix::<T>::zeros(n, n);
            for i in 0..k {
                let row = &g[i * n..(i + 1) * n];
                let (a, c) = (coef[i], curv[i]);
                for p in 0..n {
                    let rp = row[p];
                    if rp == T::zero() {
                        continue;
                    }
                    gx[p] += a * rp;
                    let crp = c * rp;
                    for q in p..n {
                        hx[(p, q)] += crp * row[q];
                    }
                }
            }
            for p in 0..n {
                for q in 0..p {
                    hx[(p, q)] = hx[(q, p)];
                }
            }
            if let Some(pen) = &self.penalty {
                pen.add_derivatives(&states[t], &mut gx, &mut hx);
            }
            lx[t] = gx;
            lxx[t] = hx;
        }

        let nominal = self.dynamics.nominal_control();
        let mut lu = Vec::with_capacity(h);
        let mut luu = Vec::with_capacity(h);
        let two_dt = two * self.dt;
        for u in controls {
            lu.push(DVector::from_iterator(
                m,
                (0..m).map(|i| two_dt * self.control_weight[i] * (u[i] - nominal[i])),
            ));
            luu.push(DMatrix::from_diagonal(&DVector::from_iterator(
                m,
                self.control_weight.iter().map(|&r| two_dt * r),
            )));
        }
        Ok(CostExpansion { lx, lxx, lu, luu })
    }

    fn state_difference(&self, a: &[T], b: &[T]) -> Vec<T> {
        let mut d: Vec<T> = a.iter().zip(b).map(|(&x, &y)| x - y).collect();
        if self.dynamics.platform() == Platform::DiffDrive {
            d[2] = wrap_angle(d[2]);
        }
        d
    }
}
