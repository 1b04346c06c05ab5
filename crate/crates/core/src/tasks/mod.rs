//! Benchmark harnesses: metric-decrease runs, erasing with a rigid tool,
//! and target search from the ground (LiDAR) and from the air (camera).
//!
//! Every trial is built from `(config, suite, platform, seed)` alone, so the
//! volumetric controller and the point baseline see identical initial
//! states, targets, pivots and hyperparameters.

pub mod report;
pub mod shapes;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::control::{ControllerConfig, RecedingHorizonController};
use crate::dynamics::{DynamicsModel, Platform, QuadcopterParams};
use crate::error::{Error, Result};
use crate::metric::{CoefficientVector, FeatureMap};
use crate::spatial::{
    sample_gmm, target_coefficients, BasisSet, GaussianMixture, SearchSpace, TargetDistribution,
};
use crate::standard::PointFeatures;
use crate::volumetric::{LidarWedgeParams, RaycastCameraParams, VolumetricFeatures, VolumetricModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Q1,
    Erasing,
    Ground,
    Aerial,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Q1, Suite::Erasing, Suite::Ground, Suite::Aerial];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Q1 => "q1",
            Suite::Erasing => "erasing",
            Suite::Ground => "ground",
            Suite::Aerial => "aerial",
        }
    }

    /// Platforms exercised by the suite.
    pub fn platforms(self) -> &'static [Platform] {
        match self {
            Suite::Q1 => &[Platform::DoubleIntegrator, Platform::DiffDrive, Platform::Quadcopter],
            Suite::Erasing => &[Platform::DoubleIntegrator],
            Suite::Ground => &[Platform::DiffDrive],
            Suite::Aerial => &[Platform::Quadcopter],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown suite `{s}` (expected q1, erasing, ground or aerial)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Plans with the robot's true footprint.
    Vec,
    /// Plans with the point footprint at the robot position.
    Baseline,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Vec => "vec",
            Method::Baseline => "baseline",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vec" => Ok(Method::Vec),
            "baseline" => Ok(Method::Baseline),
            _ => Err(Error::InvalidConfig(format!("unknown method `{s}` (expected vec or baseline)"))),
        }
    }
}

/// What completes a trial.
#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    /// Every point must come within `radius` of a footprint sample.
    Erase { points: Vec<[f64; 2]>, radius: f64 },
    /// Every target must come within `radius` of a sensor sample.
    Detect { targets: Vec<[f64; 2]>, radius: f64 },
    /// Run for a fixed number of steps.
    None,
}

impl Objective {
    fn items(&self) -> &[[f64; 2]] {
        match self {
            Objective::Erase { points, .. } => points,
            Objective::Detect { targets, .. } => targets,
            Objective::None => &[],
        }
    }

    fn radius(&self) -> f64 {
        match self {
            Objective::Erase { radius, .. } | Objective::Detect { radius, .. } => *radius,
            Objective::None => 0.0,
        }
    }
}

/// Randomized quantities of a trial, for the record.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScenarioInfo {
    pub tool_shape: Option<String>,
    pub target_shape: Option<String>,
    pub pivot: Option<[f64; 2]>,
    pub mixture_means: Vec<Vec<f64>>,
    pub targets: Vec<[f64; 2]>,
    pub initial_state: Vec<f64>,
}

/// A fully instantiated trial environment.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub suite: Suite,
    pub platform: Platform,
    pub seed: u64,
    pub basis: BasisSet<f64>,
    pub phi: CoefficientVector<f64>,
    pub dynamics: DynamicsModel<f64>,
    /// The robot's real footprint; used for completion by both methods.
    pub model: VolumetricModel<f64>,
    pub controller: ControllerConfig<f64>,
    pub initial_state: Vec<f64>,
    pub objective: Objective,
    pub budget: usize,
    pub max_steps: usize,
    pub info: ScenarioInfo,
}

impl Scenario {
    pub fn space(&self) -> &SearchSpace<f64> {
        self.basis.space()
    }
}

fn space_from(lengths: &[f64]) -> Result<SearchSpace<f64>> {
    SearchSpace::new(lengths.to_vec())
}

fn inner_point<R: Rng>(rng: &mut R, space: &SearchSpace<f64>, fraction: f64) -> Vec<f64> {
    space
        .lengths()
        .iter()
        .map(|&l| {
            let margin = 0.5 * (1.0 - fraction) * l;
            margin + rng.random::<f64>() * fraction * l
        })
        .collect()
}

/// Mixture with the configured weights, means uniform over the inner region
/// and covariances `R diag(e) Rᵀ` with eigenvalues drawn from
/// `[eigen_min, eigen_max] · L²`.
pub fn random_mixture<R: Rng>(rng: &mut R, cfg: &RunConfig, space: &SearchSpace<f64>) -> Result<GaussianMixture<f64>> {
    let s = &cfg.search;
    let l2 = space.min_length().powi(2);
    let mut means = Vec::with_capacity(s.weights.len());
    let mut covs = Vec::with_capacity(s.weights.len());
    for _ in &s.weights {
        means.push(inner_point(rng, space, s.inner_fraction));
        let e1 = rng.random_range(s.eigen_min..=s.eigen_max) * l2;
        let e2 = rng.random_range(s.eigen_min..=s.eigen_max) * l2;
        let a = rng.random::<f64>() * std::f64::consts::PI;
        let (sn, cs) = a.sin_cos();
        let r = DMatrix::from_row_slice(2, 2, &[cs, -sn, sn, cs]);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![e1, e2]));
        let mut cov = &r * d * r.transpose();
        let off = 0.5 * (cov[(0, 1)] + cov[(1, 0)]);
        cov[(0, 1)] = off;
        cov[(1, 0)] = off;
        covs.push(cov);
    }
    GaussianMixture::new(s.weights.clone(), means, covs)
}

fn controller_config(cfg: &RunConfig, platform: Platform) -> ControllerConfig<f64> {
    let c = &cfg.controller;
    let (dt, weight, altitude, tilt) = match platform {
        Platform::DoubleIntegrator => (c.planar_dt, cfg.double_integrator.control_weight.clone(), None, None),
        Platform::DiffDrive => (c.planar_dt, cfg.diff_drive.control_weight.clone(), None, None),
        Platform::Quadcopter => {
            let q = &cfg.quadcopter;
            (
                c.aerial_dt,
                q.control_weight.clone(),
                Some([q.altitude_bounds[0], q.altitude_bounds[1]]),
                Some(q.max_tilt_deg.to_radians()),
            )
        }
    };
    ControllerConfig {
        horizon: c.horizon,
        dt,
        control_weight: weight,
        ilqr: c.ilqr.clone(),
        boundary_weight: c.boundary_weight,
        boundary_margin: c.boundary_margin,
        altitude_bounds: altitude,
        tilt_limit: tilt,
    }
}

fn dynamics_for(cfg: &RunConfig, platform: Platform) -> Result<DynamicsModel<f64>> {
    match platform {
        Platform::DoubleIntegrator => DynamicsModel::double_integrator(
            cfg.double_integrator.max_linear_accel,
            cfg.double_integrator.max_angular_accel,
        ),
        Platform::DiffDrive => DynamicsModel::diff_drive(cfg.diff_drive.max_accel, cfg.diff_drive.max_angular_accel),
        Platform::Quadcopter => {
            let q = &cfg.quadcopter;
            let params =
                QuadcopterParams { mass: q.mass, inertia: [q.inertia[0], q.inertia[1], q.inertia[2]], gravity: q.gravity };
            DynamicsModel::quadcopter(params, q.max_thrust_factor * q.mass * q.gravity, q.max_torque)
        }
    }
}

/// Tool footprint for trial `seed` with a pivot drawn uniformly over its bounding box.
fn random_tool<R: Rng>(rng: &mut R, cfg: &RunConfig, seed: u64) -> Result<(String, [f64; 2], Vec<[f64; 2]>)> {
    let e = &cfg.erasing;
    let name = e.tool_shapes[(seed % e.tool_shapes.len() as u64) as usize].clone();
    let pts = shapes::load_tool(&name, e.tool_half_extent, e.tool_spacing)?;
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &pts {
        for i in 0..2 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let pivot = [lo[0] + rng.random::<f64>() * (hi[0] - lo[0]), lo[1] + rng.random::<f64>() * (hi[1] - lo[1])];
    let body = pts.iter().map(|p| [p[0] - pivot[0], p[1] - pivot[1]]).collect();
    Ok((name, pivot, body))
}

fn planar_initial<R: Rng>(rng: &mut R, cfg: &RunConfig, space: &SearchSpace<f64>, platform: Platform) -> Vec<f64> {
    let p = inner_point(rng, space, cfg.search.inner_fraction);
    let heading = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    let mut s = vec![0.0; platform.state_dim()];
    match platform {
        Platform::DoubleIntegrator | Platform::DiffDrive => {
            s[0] = p[0];
            s[1] = p[1];
            s[2] = heading;
        }
        Platform::Quadcopter => {
            s[0] = p[0];
            s[1] = p[1];
            s[2] = cfg.quadcopter.initial_altitude;
            s[5] = heading;
        }
    }
    s
}

fn to_pairs(points: Vec<Vec<f64>>) -> Vec<[f64; 2]> {
    points.into_iter().map(|p| [p[0], p[1]]).collect()
}

/// Builds the deterministic environment of one trial.
pub fn build_scenario(cfg: &RunConfig, suite: Suite, platform: Platform, seed: u64) -> Result<Scenario> {
    cfg.validate()?;
    if !suite.platforms().contains(&platform) {
        return Err(Error::InvalidConfig(format!("suite {suite} does not run on {platform}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = match platform {
        Platform::DoubleIntegrator => space_from(&cfg.erasing.space)?,
        Platform::DiffDrive => space_from(&cfg.search.ground_space)?,
        Platform::Quadcopter => space_from(&cfg.search.aerial_space)?,
    };
    let basis = BasisSet::new(space.clone(), cfg.basis.modes_per_dim)?;
    let dynamics = dynamics_for(cfg, platform)?;
    let mut info = ScenarioInfo::default();

    let mut tool = None;
    if platform == Platform::DoubleIntegrator {
        let (name, pivot, body) = random_tool(&mut rng, cfg, seed)?;
        info.tool_shape = Some(name);
        info.pivot = Some(pivot);
        tool = Some(body);
    }
    let model = match platform {
        Platform::DoubleIntegrator => VolumetricModel::rigid_body(tool.take().expect("tool drawn"))?,
        Platform::DiffDrive => {
            let l = &cfg.lidar;
            let max_range = l.range_fraction * space.min_length();
            VolumetricModel::lidar(LidarWedgeParams {
                fov: l.fov_deg.to_radians(),
                max_range,
                min_range: l.min_range_fraction * max_range,
                n_radial: l.n_radial,
                n_angular: l.n_angular,
            })?
        }
        Platform::Quadcopter => {
            let c = &cfg.camera;
            VolumetricModel::camera(RaycastCameraParams {
                hfov: c.hfov_deg.to_radians(),
                vfov: c.vfov_deg.to_radians(),
                n_u: c.n_u,
                n_v: c.n_v,
                tilt: c.tilt_deg.to_radians(),
                clip_range: c.clip_range,
            })?
        }
    };

    let (target, objective, budget) = match suite {
        Suite::Erasing => {
            let e = &cfg.erasing;
            let name = e.target_shapes[(seed % e.target_shapes.len() as u64) as usize].clone();
            let grid = shapes::load_target(&name, &space, e.mask_resolution, e.mask_fill)?;
            let points = to_pairs(grid.occupied_centers());
            info.target_shape = Some(name);
            (TargetDistribution::Grid(grid), Objective::Erase { points, radius: e.erase_radius }, e.budget)
        }
        Suite::Q1 => {
            let q = random_mixture(&mut rng, cfg, &space)?;
            info.mixture_means = q.means().to_vec();
            (TargetDistribution::GaussianMixture(q), Objective::None, cfg.q1.steps)
        }
        Suite::Ground | Suite::Aerial => {
            let q = random_mixture(&mut rng, cfg, &space)?;
            info.mixture_means = q.means().to_vec();
            let targets = to_pairs(sample_gmm(&q, &space, cfg.search.n_targets, &mut rng)?);
            info.targets = targets.clone();
            let (radius, budget) = if suite == Suite::Ground {
                (cfg.search.ground_detection_radius, cfg.search.ground_budget)
            } else {
                (cfg.search.aerial_detection_radius, cfg.search.aerial_budget)
            };
            (TargetDistribution::GaussianMixture(q), Objective::Detect { targets, radius }, budget)
        }
    };
    let initial_state = planar_initial(&mut rng, cfg, &space, platform);
    info.initial_state = initial_state.clone();
    let phi = target_coefficients(&basis, &target, cfg.basis.quadrature_cells)?;
    let max_steps = if suite == Suite::Q1 { budget } else { budget * cfg.task.truncation_factor };
    Ok(Scenario {
        suite,
        platform,
        seed,
        basis,
        phi,
        dynamics,
        model,
        controller: controller_config(cfg, platform),
        initial_state,
        objective,
        budget,
        max_steps,
        info,
    })
}

/// Outcome of one closed-loop run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub suite: Suite,
    pub platform: Platform,
    pub method: Method,
    pub seed: u64,
    pub budget: usize,
    pub max_steps: usize,
    /// Number of footprints registered when the objective was met (the
    /// initial state counts as step 1).
    pub completion_step: Option<usize>,
    pub success_under_budget: bool,
    pub objective_size: usize,
    /// Erased points or found targets after each registered footprint.
    pub progress: Vec<usize>,
    /// Executed-trajectory metric after each step, under the method's own features.
    pub metric_trace: Vec<f64>,
    pub plan_cost: Vec<f64>,
    pub ilqr_iters: Vec<usize>,
    pub plans_monotone: usize,
    pub plans_degraded: usize,
    pub wall_ms: Vec<f64>,
    /// Camera ground-footprint area per registered state (aerial platforms).
    pub footprint_area: Vec<f64>,
    pub failure: Option<String>,
    pub scenario: ScenarioInfo,
    pub states: Vec<Vec<f64>>,
    pub controls: Vec<Vec<f64>>,
    #[serde(skip)]
    pub footprints: Vec<Vec<[f64; 2]>>,
}

impl TrialRecord {
    pub fn steps_executed(&self) -> usize {
        self.controls.len()
    }

    /// Completion step, or `max_steps` for trials that never completed.
    pub fn censored_steps(&self) -> usize {
        self.completion_step.unwrap_or(self.max_steps)
    }
}

/// Monotone set of satisfied objective items.
struct Tracker<'a> {
    objective: &'a Objective,
    done: Vec<bool>,
    count: usize,
}

impl<'a> Tracker<'a> {
    fn new(objective: &'a Objective) -> Self {
        Self { objective, done: vec![false; objective.items().len()], count: 0 }
    }

    fn register(&mut self, samples: &[Vec<f64>]) -> usize {
        let r2 = self.objective.radius().powi(2);
        for (item, done) in self.objective.items().iter().zip(self.done.iter_mut()) {
            if *done {
                continue;
            }
            if samples.iter().any(|p| (p[0] - item[0]).powi(2) + (p[1] - item[1]).powi(2) <= r2) {
                *done = true;
                self.count += 1;
            }
        }
        self.count
    }

    fn complete(&self) -> bool {
        !self.done.is_empty() && self.count == self.done.len()
    }
}

/// Options that only affect what is recorded.
#[derive(Debug, Clone, Copy, Default)]
pub struct RecordOptions {
    pub timing: bool,
    pub trajectories: bool,
    pub footprints: bool,
}

impl RecordOptions {
    pub fn from_config(cfg: &RunConfig) -> Self {
        Self { timing: cfg.output.timing, trajectories: cfg.output.trajectories, footprints: cfg.output.footprints }
    }
}

fn simulate<F: FeatureMap<f64>>(sc: &Scenario, method: Method, features: F, opts: RecordOptions) -> Result<TrialRecord> {
    let ctrl = RecedingHorizonController::new(&sc.controller, features, &sc.basis, &sc.dynamics, &sc.phi)?;
    let mut memory = ctrl.new_memory();
    let mut rec = TrialRecord {
        suite: sc.suite,
        platform: sc.platform,
        method,
        seed: sc.seed,
        budget: sc.budget,
        max_steps: sc.max_steps,
        completion_step: None,
        success_under_budget: false,
        objective_size: sc.objective.items().len(),
        progress: Vec::new(),
        metric_trace: Vec::new(),
        plan_cost: Vec::new(),
        ilqr_iters: Vec::new(),
        plans_monotone: 0,
        plans_degraded: 0,
        wall_ms: Vec::new(),
        footprint_area: Vec::new(),
        failure: None,
        scenario: sc.info.clone(),
        states: Vec::new(),
        controls: Vec::new(),
        footprints: Vec::new(),
    };
    let space = sc.space();
    let mut tracker = Tracker::new(&sc.objective);
    let mut s = sc.initial_state.clone();
    rec.states.push(s.clone());
    for t in 0..sc.max_steps {
        if sc.objective != Objective::None {
            let samples = match sc.model.sample_points_unclamped(&sc.dynamics, space, &s) {
                Ok(p) => p,
                Err(e) => {
                    rec.failure = Some(e.to_string());
                    break;
                }
            };
            rec.progress.push(tracker.register(&samples));
            if opts.footprints {
                rec.footprints.push(samples.iter().map(|p| [p[0], p[1]]).collect());
            }
        } else if opts.footprints {
            if let Ok(p) = sc.model.sample_points_unclamped(&sc.dynamics, space, &s) {
                rec.footprints.push(p.iter().map(|p| [p[0], p[1]]).collect());
            }
        }
        if sc.platform == Platform::Quadcopter {
            rec.footprint_area.push(sc.model.camera_footprint_area(&sc.dynamics, space, &s).unwrap_or(f64::NAN));
        }
        if tracker.complete() {
            rec.completion_step = Some(t + 1);
            break;
        }
        let start = Instant::now();
        match ctrl.execute_step(&mut memory, &s) {
            Ok(out) => {
                let d = &out.diagnostics;
                rec.metric_trace.push(d.executed_metric);
                rec.plan_cost.push(d.plan_cost);
                rec.ilqr_iters.push(d.ilqr_iters);
                rec.plans_monotone += usize::from(d.monotone);
                rec.plans_degraded += usize::from(d.degraded);
                rec.wall_ms.push(if opts.timing { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 });
                rec.controls.push(out.control);
                s = out.next_state;
                rec.states.push(s.clone());
            }
            Err(e) => {
                rec.failure = Some(e.to_string());
                break;
            }
        }
    }
    rec.success_under_budget = rec.completion_step.is_some_and(|c| c <= sc.budget);
    if !opts.trajectories {
        rec.states.clear();
        rec.controls.clear();
    }
    Ok(rec)
}

/// Runs one trial on a prepared scenario.
pub fn run_scenario(sc: &Scenario, method: Method, opts: RecordOptions) -> Result<TrialRecord> {
    match method {
        Method::Vec => simulate(sc, method, VolumetricFeatures::new(&sc.basis, &sc.model, &sc.dynamics)?, opts),
        Method::Baseline => simulate(sc, method, PointFeatures::new(&sc.basis, &sc.dynamics)?, opts),
    }
}

/// Builds and runs a single trial. Controller failures are recorded in the
/// trial; configuration errors are returned.
pub fn run_trial(cfg: &RunConfig, suite: Suite, platform: Platform, method: Method, seed: u64) -> Result<TrialRecord> {
    let sc = build_scenario(cfg, suite, platform, seed)?;
    run_scenario(&sc, method, RecordOptions::from_config(cfg))
}

/// Descriptive statistics of one method on one platform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub platform: Platform,
    pub method: Method,
    pub trials: usize,
    pub budget: usize,
    pub successes: usize,
    pub success_under_budget: usize,
    pub failures: usize,
    /// Completion steps with unfinished trials counted at the truncation limit.
    pub median_steps: f64,
    pub lower_quartile_steps: f64,
    pub upper_quartile_steps: f64,
    pub median_wall_ms: f64,
}

/// Metric-decrease statistics of one platform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub platform: Platform,
    pub method: Method,
    pub trials: usize,
    /// Trials whose final executed metric is below 0.3 of its value at step 5.
    pub decreased: usize,
    pub plans: usize,
    pub plans_monotone: usize,
    pub median_initial_metric: f64,
    pub median_final_metric: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub suite: Suite,
    pub seeds: Vec<u64>,
    pub summaries: Vec<MethodSummary>,
    pub metric_summaries: Vec<MetricSummary>,
    /// Median volumetric completion steps over median baseline steps.
    pub step_ratio: Option<f64>,
    pub trials: Vec<TrialRecord>,
}

/// Linear-interpolation quantile of unsorted data.
pub fn quantile(data: &[f64], q: f64) -> f64 {
    if data.is_empty() {
        return f64::NAN;
    }
    let mut v = data.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

pub fn summarize(trials: &[TrialRecord], platform: Platform, method: Method) -> MethodSummary {
    let sel: Vec<&TrialRecord> = trials.iter().filter(|t| t.platform == platform && t.method == method).collect();
    let steps: Vec<f64> = sel.iter().map(|t| t.censored_steps() as f64).collect();
    let walls: Vec<f64> = sel.iter().flat_map(|t| t.wall_ms.iter().copied()).collect();
    MethodSummary {
        platform,
        method,
        trials: sel.len(),
        budget: sel.first().map_or(0, |t| t.budget),
        successes: sel.iter().filter(|t| t.completion_step.is_some()).count(),
        success_under_budget: sel.iter().filter(|t| t.success_under_budget).count(),
        failures: sel.iter().filter(|t| t.failure.is_some()).count(),
        median_steps: quantile(&steps, 0.5),
        lower_quartile_steps: quantile(&steps, 0.25),
        upper_quartile_steps: quantile(&steps, 0.75),
        median_wall_ms: quantile(&walls, 0.5),
    }
}

pub fn summarize_metric(trials: &[TrialRecord], platform: Platform, method: Method) -> MetricSummary {
    let sel: Vec<&TrialRecord> = trials.iter().filter(|t| t.platform == platform && t.method == method).collect();
    let decreased = sel
        .iter()
        .filter(|t| t.metric_trace.len() >= 5 && *t.metric_trace.last().unwrap() < 0.3 * t.metric_trace[4])
        .count();
    let first: Vec<f64> = sel.iter().filter_map(|t| t.metric_trace.first().copied()).collect();
    let last: Vec<f64> = sel.iter().filter_map(|t| t.metric_trace.last().copied()).collect();
    MetricSummary {
        platform,
        method,
        trials: sel.len(),
        decreased,
        plans: sel.iter().map(|t| t.plan_cost.len()).sum(),
        plans_monotone: sel.iter().map(|t| t.plans_monotone).sum(),
        median_initial_metric: quantile(&first, 0.5),
        median_final_metric: quantile(&last, 0.5),
    }
}

/// Runs `n_trials` seeds of a suite on a pool of `jobs` workers. The
/// metric-decrease suite runs the volumetric controller on every platform;
/// the task suites run both methods. Results are ordered by seed.
pub fn run_benchmark(
    cfg: &RunConfig,
    suite: Suite,
    n_trials: usize,
    jobs: usize,
    on_trial: &(dyn Fn(&TrialRecord) + Sync),
) -> Result<BenchmarkReport> {
    if n_trials == 0 {
        return Err(Error::InvalidConfig("n_trials must be at least 1".into()));
    }
    cfg.validate()?;
    let seeds: Vec<u64> = (0..n_trials as u64).map(|i| cfg.seed + i).collect();
    let methods: &[Method] = if suite == Suite::Q1 { &[Method::Vec] } else { &[Method::Vec, Method::Baseline] };
    let mut work = Vec::new();
    for &seed in &seeds {
        for &platform in suite.platforms() {
            for &method in methods {
                work.push((seed, platform, method));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
    let opts = RecordOptions::from_config(cfg);
    let trials: Vec<TrialRecord> = pool.install(|| {
        work.par_iter()
            .map(|&(seed, platform, method)| {
                let sc = build_scenario(cfg, suite, platform, seed)?;
                let rec = run_scenario(&sc, method, opts)?;
                on_trial(&rec);
                Ok(rec)
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut summaries = Vec::new();
    let mut metric_summaries = Vec::new();
    for &platform in suite.platforms() {
        for &method in methods {
            if suite == Suite::Q1 {
                metric_summaries.push(summarize_metric(&trials, platform, method));
            } else {
                summaries.push(summarize(&trials, platform, method));
            }
        }
    }
    let step_ratio = match summaries.as_slice() {
        [v, b] if b.median_steps > 0.0 => Some(v.median_steps / b.median_steps),
        _ => None,
    };
    Ok(BenchmarkReport { suite, seeds, summaries, metric_summaries, step_ratio, trials })
}
