//! Receding-horizon ergodic controller.
//!
//! Each step plans `H` controls with iLQR against the metric of the whole
//! trajectory (executed history followed by the plan), applies the first
//! control and folds the current state's basis values into the running
//! mean kept in [`ControllerMemory`].

mod ergodic;
pub mod ilqr;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use ergodic::{BoxPenalty, ErgodicProblem};
pub use ilqr::{IlqrSettings, IlqrSolution, LineSearch, Regularization, TrajectoryProblem};

use crate::dynamics::DynamicsModel;
use crate::error::{Error, Result};
use crate::metric::{metric_from_values, CoefficientVector, FeatureMap};
use crate::scalar::Scalar;
use crate::spatial::BasisSet;

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerConfig<T: Scalar> {
    /// Planning horizon in steps.
    pub horizon: usize,
    pub dt: T,
    /// Diagonal of the control weight `R`.
    pub control_weight: Vec<T>,
    pub ilqr: IlqrSettings<T>,
    /// Weight of the quadratic penalty keeping the position inside the search space.
    pub boundary_weight: T,
    /// Inset of the penalty box from the search-space boundary.
    pub boundary_margin: T,
    /// Optional altitude band for platforms with a vertical position.
    pub altitude_bounds: Option<[T; 2]>,
    /// Optional bound on |roll| and |pitch| for platforms with an attitude.
    pub tilt_limit: Option<T>,
}

impl<T: Scalar> ControllerConfig<T> {
    /// Defaults: `H = 20`, `R = 1e-2 · I`.
    pub fn new(dt: T, control_dim: usize) -> Self {
        Self {
            horizon: 20,
            dt,
            control_weight: vec![T::lit(1e-2); control_dim],
            ilqr: IlqrSettings::default(),
            boundary_weight: T::lit(100.0),
            boundary_margin: T::zero(),
            altitude_bounds: None,
            tilt_limit: None,
        }
    }

    pub fn validate(&self, control_dim: usize) -> Result<()> {
        if self.horizon < 2 {
            return Err(Error::InvalidConfig(format!("horizon must be at least 2, got {}", self.horizon)));
        }
        if !(self.dt > T::zero()) {
            return Err(Error::InvalidConfig("dt must be positive".into()));
        }
        if self.control_weight.len() != control_dim {
            return Err(Error::InvalidConfig(format!(
                "control_weight has {} entries, platform has {control_dim} controls",
                self.control_weight.len()
            )));
        }
        if self.control_weight.iter().any(|r| !(*r > T::zero() && r.is_finite())) {
            return Err(Error::InvalidConfig("control_weight must be positive (R SPD)".into()));
        }
        if !(self.boundary_weight >= T::zero() && self.boundary_margin >= T::zero()) {
            return Err(Error::InvalidConfig("boundary weight and margin must be non-negative".into()));
        }
        if let Some(t) = self.tilt_limit {
            if !(t > T::zero()) {
                return Err(Error::InvalidConfig("tilt_limit must be positive".into()));
            }
        }
        if let Some([lo, hi]) = self.altitude_bounds {
            if !(lo < hi) {
                return Err(Error::InvalidConfig("altitude_bounds must be increasing".into()));
            }
        }
        self.ilqr.validate()
    }
}

/// Running time average of executed basis values plus the warm-start tape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllerMemory<T> {
    pub elapsed_steps: usize,
    pub running_mean: Vec<T>,
    pub last_plan: Option<Vec<Vec<T>>>,
}

impl<T: Scalar> ControllerMemory<T> {
    pub fn new(num_features: usize) -> Self {
        Self { elapsed_steps: 0, running_mean: vec![T::zero(); num_features], last_plan: None }
    }

    /// Incremental mean update with one more state's basis values.
    pub fn fold(&mut self, values: &[T]) {
        self.elapsed_steps += 1;
        let inv = T::one() / T::from_usize_lossy(self.elapsed_steps);
        for (m, &v) in self.running_mean.iter_mut().zip(values) {
            *m += (v - *m) * inv;
        }
    }

    pub fn coefficients(&self) -> CoefficientVector<T> {
        CoefficientVector::new(self.running_mean.clone())
    }

    /// Previous plan shifted by one step, last control repeated.
    pub fn warm_start(&self, horizon: usize, nominal: &[T]) -> Vec<Vec<T>> {
        let mut tape = match &self.last_plan {
            Some(p) if !p.is_empty() => p[1..].to_vec(),
            _ => Vec::new(),
        };
        let fill = tape.last().cloned().unwrap_or_else(|| nominal.to_vec());
        tape.truncate(horizon);
        while tape.len() < horizon {
            tape.push(fill.clone());
        }
        tape
    }
}

/// Per-step record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepDiagnostics<T> {
    pub step: usize,
    /// Metric of the executed states only (after folding the current one).
    pub executed_metric: T,
    pub initial_plan_cost: T,
    pub plan_cost: T,
    pub ilqr_iters: usize,
    /// iLQR costs never increased within the plan.
    pub monotone: bool,
    pub degraded: bool,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome<T> {
    pub control: Vec<T>,
    pub next_state: Vec<T>,
    pub plan: IlqrSolution<T>,
    pub diagnostics: StepDiagnostics<T>,
}

/// Closed-loop controller for one feature map (volumetric or point).
pub struct RecedingHorizonController<'a, T: Scalar, F: FeatureMap<T>> {
    pub config: &'a ControllerConfig<T>,
    pub features: F,
    pub basis: &'a BasisSet<T>,
    pub dynamics: &'a DynamicsModel<T>,
    pub phi: &'a CoefficientVector<T>,
}

impl<'a, T: Scalar, F: FeatureMap<T>> RecedingHorizonController<'a, T, F> {
    pub fn new(
        config: &'a ControllerConfig<T>,
        features: F,
        basis: &'a BasisSet<T>,
        dynamics: &'a DynamicsModel<T>,
        phi: &'a CoefficientVector<T>,
    ) -> Result<Self> {
        config.validate(dynamics.control_dim())?;
        if phi.len() != basis.len() || features.num_features() != basis.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), got: phi.len() });
        }
        Ok(Self { config, features, basis, dynamics, phi })
    }

    pub fn new_memory(&self) -> ControllerMemory<T> {
        ControllerMemory::new(self.basis.len())
    }

    fn penalty(&self) -> Option<BoxPenalty<T>> {
        let cfg = self.config;
        if cfg.boundary_weight == T::zero() {
            return None;
        }
        let lengths = self.basis.space().lengths();
        let pos = self.dynamics.position_indices();
        let mut indices = Vec::new();
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for (i, &l) in lengths.iter().enumerate().take(pos.len()) {
            indices.push(pos[i]);
            lower.push(cfg.boundary_margin);
            upper.push(l - cfg.boundary_margin);
        }
        if let (Some([lo, hi]), Some(&z)) = (cfg.altitude_bounds, pos.get(lengths.len())) {
            indices.push(z);
            lower.push(lo);
            upper.push(hi);
        }
        if let (Some(t), Some(pose)) = (cfg.tilt_limit, self.dynamics.spatial_pose_indices()) {
            for i in [pose[3], pose[4]] {
                indices.push(i);
                lower.push(-t);
                upper.push(t);
            }
        }
        Some(BoxPenalty { indices, lower, upper, weight: cfg.boundary_weight })
    }

    fn problem(&self, memory: &ControllerMemory<T>, s_now: &[T]) -> Result<ErgodicProblem<'_, T, F>> {
        ErgodicProblem::new(
            &self.features,
            self.basis.weights(),
            self.phi.values(),
            self.dynamics,
            self.config.dt,
            &self.config.control_weight,
            self.penalty(),
            &memory.running_mean,
            memory.elapsed_steps,
            s_now,
        )
    }

    /// Optimizes the next `H` controls from `s_now` given the executed history.
    pub fn plan(&self, memory: &ControllerMemory<T>, s_now: &[T]) -> Result<IlqrSolution<T>> {
        if memory.running_mean.len() != self.basis.len() {
            return Err(Error::DimensionMismatch { expected: self.basis.len(), got: memory.running_mean.len() });
        }
        if s_now.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("current state"));
        }
        let problem = self.problem(memory, s_now)?;
        let nominal = self.dynamics.nominal_control();
        let warm = memory.warm_start(self.config.horizon, nominal);
        match ilqr::solve(&problem, s_now, warm, &self.config.ilqr) {
            Ok(sol) => Ok(sol),
            Err(_) if memory.last_plan.is_some() => {
                let cold = vec![nominal.to_vec(); self.config.horizon];
                ilqr::solve(&problem, s_now, cold, &self.config.ilqr)
            }
            Err(e) => Err(e),
        }
    }

    /// Plans, applies the first control, and folds `s_now` into memory.
    pub fn execute_step(&self, memory: &mut ControllerMemory<T>, s_now: &[T]) -> Result<StepOutcome<T>> {
        let start = Instant::now();
        let plan = self.plan(memory, s_now)?;
        let control = plan.controls[0].clone();
        let next_state = self.dynamics.step_rk4(s_now, &control, self.config.dt)?;
        let mut now = vec![T::zero(); self.basis.len()];
        self.features.features(s_now, &mut now)?;
        memory.fold(&now);
        memory.last_plan = Some(plan.controls.clone());
        let executed_metric = metric_from_values(&memory.running_mean, self.phi.values(), self.basis.weights());
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        let monotone = plan.costs.windows(2).all(|w| w[1] <= w[0]);
        let diagnostics = StepDiagnostics {
            step: memory.elapsed_steps,
            executed_metric,
            initial_plan_cost: plan.costs[0],
            plan_cost: plan.final_cost(),
            ilqr_iters: plan.iterations,
            monotone,
            degraded: plan.degraded,
            wall_ms,
        };
        Ok(StepOutcome { control, next_state, plan, diagnostics })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn memory_fold_and_warm_start() {
        let mut m = ControllerMemory::<f64>::new(2);
        m.fold(&[1.0, 2.0]);
        assert_eq!(m.running_mean, vec![1.0, 2.0]);
        m.fold(&[3.0, 0.0]);
        assert_eq!(m.running_mean, vec![2.0, 1.0]);
        assert_eq!(m.warm_start(3, &[0.5]), vec![vec![0.5]; 3]);
        m.last_plan = Some(vec![vec![1.0], vec![2.0], vec![3.0]]);
        assert_eq!(m.warm_start(3, &[0.0]), vec![vec![2.0], vec![3.0], vec![3.0]]);
    }

    #[test]
    fn config_validation_names_field() {
        let mut c = ControllerConfig::<f64>::new(0.1, 2);
        assert!(c.validate(2).is_ok());
        c.horizon = 0;
        assert!(c.validate(2).unwrap_err().to_string().contains("horizon"));
        let mut c = ControllerConfig::<f64>::new(0.1, 2);
        c.control_weight = vec![1.0, -1.0];
        assert!(c.validate(2).is_err());
        assert!(ControllerConfig::<f64>::new(0.1, 2).validate(3).is_err());
    }
}
