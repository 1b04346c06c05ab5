//! Iterative LQR with Levenberg regularization of the value Hessian and a
//! backtracking line search on the feedforward scale.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, cholesky_solve, symmetrize};
use crate::scalar::Scalar;

/// Second-order expansion of the cost along a trajectory. State terms are
/// indexed `0..=H`, control terms `0..H`.
#[derive(Debug, Clone)]
pub struct CostExpansion<T: Scalar> {
    pub lx: Vec<DVector<T>>,
    pub lxx: Vec<DMatrix<T>>,
    pub lu: Vec<DVector<T>>,
    pub luu: Vec<DMatrix<T>>,
}

/// Finite-horizon problem solved by [`solve`].
pub trait TrajectoryProblem<T: Scalar> {
    fn state_dim(&self) -> usize;
    fn control_dim(&self) -> usize;
    /// Discrete transition; may clamp the control.
    fn step(&self, s: &[T], u: &[T]) -> Result<Vec<T>>;
    /// Control actually applied for a requested one.
    fn admissible_control(&self, u: &[T]) -> Vec<T> {
        u.to_vec()
    }
    fn linearize(&self, s: &[T], u: &[T]) -> Result<(DMatrix<T>, DMatrix<T>)>;
    fn cost(&self, states: &[Vec<T>], controls: &[Vec<T>]) -> Result<T>;
    fn expand(&self, states: &[Vec<T>], controls: &[Vec<T>]) -> Result<CostExpansion<T>>;
    /// `a − b` in the state's tangent space (wraps angles where needed).
    fn state_difference(&self, a: &[T], b: &[T]) -> Vec<T> {
        a.iter().zip(b).map(|(&x, &y)| x - y).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LineSearch<T: Scalar> {
    /// Backtracking factor in `(0, 1)`.
    pub shrink: T,
    pub max_trials: usize,
    /// Fraction of the predicted decrease that must be realized.
    pub armijo: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Regularization<T: Scalar> {
    pub initial: T,
    pub min: T,
    pub max: T,
    pub factor: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IlqrSettings<T: Scalar> {
    pub max_iters: usize,
    /// Relative cost decrease below which iterations stop.
    pub tolerance: T,
    pub line_search: LineSearch<T>,
    pub regularization: Regularization<T>,
}

impl<T: Scalar> Default for LineSearch<T> {
    fn default() -> Self {
        Self { shrink: T::lit(0.5), max_trials: 8, armijo: T::lit(1e-4) }
    }
}

impl<T: Scalar> Default for Regularization<T> {
    fn default() -> Self {
        Self { initial: T::lit(1e-6), min: T::lit(1e-6), max: T::lit(1e6), factor: T::lit(10.0) }
    }
}

impl<T: Scalar> Default for IlqrSettings<T> {
    fn default() -> Self {
        Self {
            max_iters: 10,
            tolerance: T::lit(1e-3),
            line_search: LineSearch::default(),
            regularization: Regularization::default(),
        }
    }
}

impl<T: Scalar> IlqrSettings<T> {
    pub fn validate(&self) -> Result<()> {
        let ls = &self.line_search;
        let reg = &self.regularization;
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if !(ls.shrink > T::zero() && ls.shrink < T::one()) {
            return bad("line_search.shrink must lie in (0, 1)");
        }
        if ls.max_trials == 0 {
            return bad("line_search.max_trials must be positive");
        }
        if !(ls.armijo >= T::zero() && ls.armijo < T::one()) {
            return bad("line_search.armijo must lie in [0, 1)");
        }
        if !(self.tolerance > T::zero()) {
            return bad("tolerance must be positive");
        }
        if !(reg.initial >= T::zero() && reg.min > T::zero() && reg.max >= reg.min && reg.factor > T::one()) {
            return bad("regularization needs initial ≥ 0, 0 < min ≤ max and factor > 1");
        }
        Ok(())
    }
}

/// Outcome of one solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IlqrSolution<T> {
    pub states: Vec<Vec<T>>,
    pub controls: Vec<Vec<T>>,
    /// Cost of the initial rollout followed by every accepted iterate.
    pub costs: Vec<T>,
    pub iterations: usize,
    /// Line-search trials per iteration.
    pub trials: Vec<usize>,
    /// Regularization ran past its maximum before convergence.
    pub degraded: bool,
}

impl<T: Scalar> IlqrSolution<T> {
    pub fn final_cost(&self) -> T {
        *self.costs.last().expect("initial cost recorded")
    }
}

/// Rolls the controls forward from `s0`, storing the admissible controls.
pub fn rollout<T: Scalar, P: TrajectoryProblem<T> + ?Sized>(
    problem: &P,
    s0: &[T],
    controls: &[Vec<T>],
) -> Result<(Vec<Vec<T>>, Vec<Vec<T>>)> {
    let mut states = Vec::with_capacity(controls.len() + 1);
    let mut applied = Vec::with_capacity(controls.len());
    states.push(s0.to_vec());
    for u in controls {
        let u = problem.admissible_control(u);
        let next = problem.step(states.last().expect("non-empty"), &u)?;
        states.push(next);
        applied.push(u);
    }
    Ok((states, applied))
}

struct Gains<T: Scalar> {
    k: Vec<DVector<T>>,
    big_k: Vec<DMatrix<T>>,
    dv1: T,
    dv2: T,
}

fn backward<T: Scalar>(
    exp: &CostExpansion<T>,
    lin: &[(DMatrix<T>, DMatrix<T>)],
    mu: T,
) -> Option<Gains<T>> {
    let h = lin.len();
    let n = exp.lx[0].len();
    let mut vx = exp.lx[h].clone();
    let mut vxx = exp.lxx[h].clone();
    let mut k = vec![DVector::zeros(0); h];
    let mut big_k = vec![DMatrix::zeros(0, 0); h];
    let mut dv1 = T::zero();
    let mut dv2 = T::zero();
    let half = T::lit(0.5);
    for t in (0..h).rev() {
        let (a, b) = &lin[t];
        let at = a.transpose();
        let bt = b.transpose();
        let qx = &exp.lx[t] + &at * &vx;
        let qu = &exp.lu[t] + &bt * &vx;
        let qxx = &exp.lxx[t] + &at * &vxx * a;
        let quu = &exp.luu[t] + &bt * &vxx * b;
        let qux = &bt * &vxx * a;
        let vreg = &vxx + DMatrix::<T>::identity(n, n) * mu;
        let mut quu_reg = &exp.luu[t] + &bt * &vreg * b;
        symmetrize(&mut quu_reg);
        let qux_reg = &bt * &vreg * a;
        let l = cholesky(&quu_reg)?;
        let kt = -cholesky_solve(&l, &DMatrix::from_column_slice(qu.len(), 1, qu.as_slice())).column(0).into_owned();
        let kk = -cholesky_solve(&l, &qux_reg);
        if kt.iter().chain(kk.iter()).any(|v| !v.is_finite()) {
            return None;
        }
        let kkt = kk.transpose();
        vx = &qx + &kkt * &quu * &kt + &kkt * &qu + qux.transpose() * &kt;
        vxx = &qxx + &kkt * &quu * &kk + &kkt * &qux + qux.transpose() * &kk;
        symmetrize(&mut vxx);
        dv1 += kt.dot(&qu);
        dv2 += half * kt.dot(&(&quu * &kt));
        k[t] = kt;
        big_k[t] = kk;
    }
    Some(Gains { k, big_k, dv1, dv2 })
}

fn forward<T: Scalar, P: TrajectoryProblem<T> + ?Sized>(
    problem: &P,
    states: &[Vec<T>],
    controls: &[Vec<T>],
    gains: &Gains<T>,
    alpha: T,
) -> Result<(Vec<Vec<T>>, Vec<Vec<T>>)> {
    let h = controls.len();
    let mut new_states = Vec::with_capacity(h + 1);
    let mut new_controls = Vec::with_capacity(h);
    new_states.push(states[0].clone());
    for t in 0..h {
        let x = new_states.last().expect("non-empty");
        let dx = DVector::from_vec(problem.state_difference(x, &states[t]));
        let du = &gains.k[t] * alpha + &gains.big_k[t] * dx;
        let u: Vec<T> = controls[t].iter().zip(du.iter()).map(|(&u, &d)| u + d).collect();
        let u = problem.admissible_control(&u);
        let next = problem.step(x, &u)?;
        new_states.push(next);
        new_controls.push(u);
    }
    Ok((new_states, new_controls))
}

/// Minimizes the problem's cost from `s0`, starting at `initial_controls`.
///
/// Accepted iterates never increase the cost; when no decrease is possible
/// the initial rollout is returned unchanged.
pub fn solve<T: Scalar, P: TrajectoryProblem<T> + ?Sized>(
    problem: &P,
    s0: &[T],
    initial_controls: Vec<Vec<T>>,
    settings: &IlqrSettings<T>,
) -> Result<IlqrSolution<T>> {
    settings.validate()?;
    if initial_controls.is_empty() {
        return Err(Error::InvalidConfig("horizon must contain at least one control".into()));
    }
    let (mut states, mut controls) = rollout(problem, s0, &initial_controls)?;
    let mut cost = problem.cost(&states, &controls)?;
    if !cost.is_finite() {
        return Err(Error::Divergence("initial rollout cost is not finite".into()));
    }
    let reg = &settings.regularization;
    let ls = &settings.line_search;
    let mut costs = vec![cost];
    let mut trials = Vec::new();
    let mut mu = reg.initial;
    let mut degraded = false;
    let mut iterations = 0;
    let tiny = T::epsilon() * T::lit(100.0);

    'outer: while iterations < settings.max_iters {
        iterations += 1;
        let exp = problem.expand(&states, &controls)?;
        let lin = states[..controls.len()]
            .iter()
            .zip(&controls)
            .map(|(s, u)| problem.linearize(s, u))
            .collect::<Result<Vec<_>>>()?;

        let gains = loop {
            match backward(&exp, &lin, mu) {
                Some(g) => break g,
                None => {
                    mu = (mu * reg.factor).max(reg.min);
                    if mu > reg.max {
                        degraded = true;
                        break 'outer;
                    }
                }
            }
        };

        // predicted decrease for step α is −(α dv1 + α² dv2)
        let predicted_full = -(gains.dv1 + gains.dv2);
        let stationary = !(predicted_full > tiny * (T::one() + cost.abs()));
        let mut alpha = T::one();
        let mut accepted = None;
        let mut used = 0;
        let max_trials = if stationary { 1 } else { ls.max_trials };
        for _ in 0..max_trials {
            used += 1;
            if let Ok((s_new, u_new)) = forward(problem, &states, &controls, &gains, alpha) {
                if let Ok(c_new) = problem.cost(&s_new, &u_new) {
                    let predicted = -(alpha * gains.dv1 + alpha * alpha * gains.dv2);
                    let enough = stationary || cost - c_new >= ls.armijo * predicted;
                    if c_new.is_finite() && c_new <= cost && enough {
                        accepted = Some((s_new, u_new, c_new));
                        break;
                    }
                }
            }
            alpha *= ls.shrink;
        }
        trials.push(used);

        match accepted {
            Some((s_new, u_new, c_new)) => {
                let decrease = cost - c_new;
                states = s_new;
                controls = u_new;
                cost = c_new;
                costs.push(cost);
                mu = if mu / reg.factor < reg.min { T::zero() } else { mu / reg.factor };
                if stationary || decrease <= settings.tolerance * cost.abs().max(tiny) {
                    break;
                }
            }
            None => {
                if stationary {
                    break;
                }
                mu = (mu * reg.factor).max(reg.min);
                if mu > reg.max {
                    degraded = true;
                    break;
                }
            }
        }
    }

    Ok(IlqrSolution { states, controls, costs, iterations, trials, degraded })
}
