//! Run configuration: a TOML document with documented defaults, strict
//! key checking and dotted `key=value` overrides.

use serde::{Deserialize, Serialize};

use crate::control::IlqrSettings;
use crate::error::{Error, Result};
use crate::tasks::{Method, Suite};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Seed of the first trial; trial `i` uses `seed + i`.
    pub seed: u64,
    pub output_dir: String,
    pub task: TaskSection,
    pub basis: BasisSection,
    pub controller: ControllerSection,
    pub erasing: ErasingSection,
    pub search: SearchSection,
    pub q1: Q1Section,
    pub double_integrator: DoubleIntegratorSection,
    pub diff_drive: DiffDriveSection,
    pub quadcopter: QuadcopterSection,
    pub lidar: LidarSection,
    pub camera: CameraSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TaskSection {
    pub suite: Suite,
    pub method: Method,
    pub n_trials: usize,
    /// Trials stop at this multiple of the suite budget.
    pub truncation_factor: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BasisSection {
    pub modes_per_dim: usize,
    pub quadrature_cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControllerSection {
    pub horizon: usize,
    pub planar_dt: f64,
    pub aerial_dt: f64,
    pub boundary_weight: f64,
    pub boundary_margin: f64,
    pub ilqr: IlqrSettings<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ErasingSection {
    pub space: Vec<f64>,
    pub budget: usize,
    /// Trial `i` uses entry `i mod len`.
    pub tool_shapes: Vec<String>,
    pub tool_half_extent: f64,
    pub tool_spacing: f64,
    pub target_shapes: Vec<String>,
    pub mask_resolution: usize,
    pub mask_fill: f64,
    pub erase_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchSection {
    pub ground_space: Vec<f64>,
    pub aerial_space: Vec<f64>,
    pub ground_budget: usize,
    pub aerial_budget: usize,
    pub ground_detection_radius: f64,
    pub aerial_detection_radius: f64,
    pub weights: Vec<f64>,
    /// Covariance eigenvalue range as a fraction of `L²`.
    pub eigen_min: f64,
    pub eigen_max: f64,
    /// Means and initial positions are drawn from this central fraction of the space.
    pub inner_fraction: f64,
    pub n_targets: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Q1Section {
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DoubleIntegratorSection {
    pub max_linear_accel: f64,
    pub max_angular_accel: f64,
    pub control_weight: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiffDriveSection {
    pub max_accel: f64,
    pub max_angular_accel: f64,
    pub control_weight: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadcopterSection {
    pub mass: f64,
    pub inertia: Vec<f64>,
    pub gravity: f64,
    /// Thrust upper bound as a multiple of `m g`.
    pub max_thrust_factor: f64,
    pub max_torque: f64,
    pub control_weight: Vec<f64>,
    pub initial_altitude: f64,
    pub altitude_bounds: Vec<f64>,
    /// Roll and pitch bound enforced by the boundary penalty.
    pub max_tilt_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LidarSection {
    pub fov_deg: f64,
    /// Maximum range as a fraction of the shortest side of the space.
    pub range_fraction: f64,
    /// Minimum range as a fraction of the maximum range.
    pub min_range_fraction: f64,
    pub n_radial: usize,
    pub n_angular: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CameraSection {
    pub hfov_deg: f64,
    pub vfov_deg: f64,
    pub n_u: usize,
    pub n_v: usize,
    pub tilt_deg: f64,
    pub clip_range: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Record per-step wall time. Off by default so outputs are reproducible.
    pub timing: bool,
    pub trajectories: bool,
    pub footprints: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            output_dir: "out".into(),
            task: TaskSection::default(),
            basis: BasisSection::default(),
            controller: ControllerSection::default(),
            erasing: ErasingSection::default(),
            search: SearchSection::default(),
            q1: Q1Section::default(),
            double_integrator: DoubleIntegratorSection::default(),
            diff_drive: DiffDriveSection::default(),
            quadcopter: QuadcopterSection::default(),
            lidar: LidarSection::default(),
            camera: CameraSection::default(),
            output: OutputSection::default(),
        }
    }
}

impl Default for TaskSection {
    fn default() -> Self {
        Self { suite: Suite::Erasing, method: Method::Vec, n_trials: 25, truncation_factor: 3 }
    }
}

impl Default for BasisSection {
    fn default() -> Self {
        Self { modes_per_dim: 8, quadrature_cells: 256 }
    }
}

impl Default for ControllerSection {
    fn default() -> Self {
        Self {
            horizon: 20,
            planar_dt: 0.1,
            aerial_dt: 0.05,
            boundary_weight: 100.0,
            boundary_margin: 0.0,
            ilqr: IlqrSettings::default(),
        }
    }
}

impl Default for ErasingSection {
    fn default() -> Self {
        Self {
            space: vec![1.0, 1.0],
            budget: 400,
            tool_shapes: ["bar", "l-shape", "triangle", "cross", "disc"].map(String::from).to_vec(),
            tool_half_extent: 0.2,
            tool_spacing: 0.02,
            target_shapes: ["ring", "cross", "l-shape", "triangle", "square"].map(String::from).to_vec(),
            mask_resolution: 24,
            mask_fill: 0.7,
            erase_radius: 0.02 / std::f64::consts::SQRT_2,
        }
    }
}

impl Default for SearchSection {
    fn default() -> Self {
        Self {
            ground_space: vec![1.0, 1.0],
            aerial_space: vec![2.0, 2.0],
            ground_budget: 100,
            aerial_budget: 400,
            ground_detection_radius: 0.05,
            aerial_detection_radius: 0.1,
            weights: vec![0.5, 0.3, 0.2],
            eigen_min: 0.005,
            eigen_max: 0.02,
            inner_fraction: 0.8,
            n_targets: 3,
        }
    }
}

impl Default for Q1Section {
    fn default() -> Self {
        Self { steps: 150 }
    }
}

impl Default for DoubleIntegratorSection {
    fn default() -> Self {
        Self { max_linear_accel: 1.0, max_angular_accel: 4.0, control_weight: vec![1e-2; 3] }
    }
}

impl Default for DiffDriveSection {
    fn default() -> Self {
        Self { max_accel: 1.0, max_angular_accel: 4.0, control_weight: vec![1e-2; 2] }
    }
}

impl Default for QuadcopterSection {
    fn default() -> Self {
        Self {
            mass: 1.0,
            inertia: vec![0.01, 0.01, 0.02],
            gravity: 9.81,
            max_thrust_factor: 2.0,
            max_torque: 0.1,
            control_weight: vec![1e-2, 10.0, 10.0, 10.0],
            initial_altitude: 0.5,
            altitude_bounds: vec![0.2, 3.0],
            max_tilt_deg: 30.0,
        }
    }
}

impl Default for LidarSection {
    fn default() -> Self {
        Self { fov_deg: 120.0, range_fraction: 0.25, min_range_fraction: 0.01, n_radial: 40, n_angular: 25 }
    }
}

impl Default for CameraSection {
    fn default() -> Self {
        Self { hfov_deg: 60.0, vfov_deg: 45.0, n_u: 40, n_v: 25, tilt_deg: 20.0, clip_range: 3.0 }
    }
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { timing: false, trajectories: true, footprints: false }
    }
}

impl RunConfig {
    /// Parses a document, applies `key=value` overrides and validates.
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let mut doc: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let cfg: RunConfig = doc.try_into().map_err(|e: toml::de::Error| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text, overrides).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            Error::InvalidConfig(m) => Error::InvalidConfig(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Fully resolved document.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, why: &str| Err(Error::InvalidConfig(format!("{field}: {why}")));
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if self.task.n_trials == 0 {
            return bad("task.n_trials", "must be at least 1");
        }
        if self.task.truncation_factor == 0 {
            return bad("task.truncation_factor", "must be at least 1");
        }
        if self.basis.modes_per_dim == 0 {
            return bad("basis.modes_per_dim", "must be at least 1");
        }
        if self.basis.quadrature_cells < 2 * self.basis.modes_per_dim {
            return bad("basis.quadrature_cells", "must be at least twice basis.modes_per_dim");
        }
        let c = &self.controller;
        if c.horizon < 2 {
            return bad("controller.horizon", &format!("must be at least 2, got {}", c.horizon));
        }
        if !positive(c.planar_dt) {
            return bad("controller.planar_dt", "must be positive");
        }
        if !positive(c.aerial_dt) {
            return bad("controller.aerial_dt", "must be positive");
        }
        if !(c.boundary_weight >= 0.0 && c.boundary_margin >= 0.0) {
            return bad("controller.boundary_weight", "weight and margin must be non-negative");
        }
        c.ilqr.validate().map_err(|e| Error::InvalidConfig(format!("controller.ilqr: {e}")))?;

        let e = &self.erasing;
        check_space("erasing.space", &e.space)?;
        if e.budget == 0 {
            return bad("erasing.budget", "must be at least 1");
        }
        if e.tool_shapes.is_empty() {
            return bad("erasing.tool_shapes", "must not be empty");
        }
        if e.target_shapes.is_empty() {
            return bad("erasing.target_shapes", "must not be empty");
        }
        if !positive(e.tool_half_extent) || !positive(e.tool_spacing) || e.tool_spacing > 2.0 * e.tool_half_extent {
            return bad("erasing.tool_spacing", "needs 0 < tool_spacing ≤ 2·tool_half_extent");
        }
        if e.mask_resolution == 0 || !(e.mask_fill > 0.0 && e.mask_fill <= 1.0) {
            return bad("erasing.mask_fill", "mask_resolution ≥ 1 and mask_fill in (0, 1]");
        }
        if !positive(e.erase_radius) {
            return bad("erasing.erase_radius", "must be positive");
        }

        let s = &self.search;
        check_space("search.ground_space", &s.ground_space)?;
        check_space("search.aerial_space", &s.aerial_space)?;
        if s.ground_budget == 0 || s.aerial_budget == 0 {
            return bad("search.ground_budget", "budgets must be at least 1");
        }
        if !positive(s.ground_detection_radius) {
            return bad("search.ground_detection_radius", "must be positive");
        }
        if !positive(s.aerial_detection_radius) {
            return bad("search.aerial_detection_radius", "must be positive");
        }
        if s.weights.is_empty() || s.weights.iter().any(|w| !(*w >= 0.0)) || (s.weights.iter().sum::<f64>() - 1.0).abs() > 1e-6 {
            return bad("search.weights", "must be non-negative and sum to 1");
        }
        if !(positive(s.eigen_min) && s.eigen_max >= s.eigen_min) {
            return bad("search.eigen_min", "needs 0 < eigen_min ≤ eigen_max");
        }
        if !(s.inner_fraction > 0.0 && s.inner_fraction <= 1.0) {
            return bad("search.inner_fraction", "must lie in (0, 1]");
        }
        if s.n_targets == 0 {
            return bad("search.n_targets", "must be at least 1");
        }
        if self.q1.steps == 0 {
            return bad("q1.steps", "must be at least 1");
        }

        let di = &self.double_integrator;
        if !(positive(di.max_linear_accel) && positive(di.max_angular_accel)) {
            return bad("double_integrator.max_linear_accel", "limits must be positive");
        }
        check_weights("double_integrator.control_weight", &di.control_weight, 3)?;
        let dd = &self.diff_drive;
        if !(positive(dd.max_accel) && positive(dd.max_angular_accel)) {
            return bad("diff_drive.max_accel", "limits must be positive");
        }
        check_weights("diff_drive.control_weight", &dd.control_weight, 2)?;
        let q = &self.quadcopter;
        if !(positive(q.mass) && positive(q.gravity)) {
            return bad("quadcopter.mass", "mass and gravity must be positive");
        }
        if q.inertia.len() != 3 || !q.inertia.iter().all(|&v| positive(v)) {
            return bad("quadcopter.inertia", "needs three positive entries");
        }
        if !(q.max_thrust_factor > 1.0 && q.max_thrust_factor.is_finite()) {
            return bad("quadcopter.max_thrust_factor", "must exceed 1 so the vehicle can hover");
        }
        if !positive(q.max_torque) {
            return bad("quadcopter.max_torque", "must be positive");
        }
        check_weights("quadcopter.control_weight", &q.control_weight, 4)?;
        if !positive(q.initial_altitude) {
            return bad("quadcopter.initial_altitude", "must be positive");
        }
        if q.altitude_bounds.len() != 2 || !(q.altitude_bounds[0] < q.altitude_bounds[1]) {
            return bad("quadcopter.altitude_bounds", "needs [low, high] with low < high");
        }
        if !(q.max_tilt_deg > 0.0 && q.max_tilt_deg < 90.0) {
            return bad("quadcopter.max_tilt_deg", "must lie in (0, 90)");
        }

        let l = &self.lidar;
        if !(l.fov_deg > 0.0 && l.fov_deg < 360.0) {
            return bad("lidar.fov_deg", "must lie in (0, 360)");
        }
        if !positive(l.range_fraction) || !(l.min_range_fraction >= 0.0 && l.min_range_fraction < 1.0) {
            return bad("lidar.range_fraction", "needs range_fraction > 0 and min_range_fraction in [0, 1)");
        }
        if l.n_radial == 0 || l.n_angular == 0 {
            return bad("lidar.n_radial", "grid sizes must be positive");
        }
        let cam = &self.camera;
        if !(cam.hfov_deg > 0.0 && cam.hfov_deg < 180.0 && cam.vfov_deg > 0.0 && cam.vfov_deg < 180.0) {
            return bad("camera.hfov_deg", "fields of view must lie in (0, 180)");
        }
        if cam.n_u == 0 || cam.n_v == 0 {
            return bad("camera.n_u", "grid sizes must be positive");
        }
        if !positive(cam.clip_range) {
            return bad("camera.clip_range", "must be positive");
        }
        Ok(())
    }
}

fn check_space(field: &str, lengths: &[f64]) -> Result<()> {
    if lengths.len() != 2 || lengths.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
        return Err(Error::InvalidConfig(format!("{field}: needs two positive side lengths")));
    }
    Ok(())
}

fn check_weights(field: &str, w: &[f64], m: usize) -> Result<()> {
    if w.len() != m || w.iter().any(|&r| !(r.is_finite() && r > 0.0)) {
        return Err(Error::InvalidConfig(format!("{field}: needs {m} positive entries")));
    }
    Ok(())
}

/// Sets a dotted path such as `controller.ilqr.max_iters=5`. The value is
/// read as a TOML value, falling back to a bare string.
pub fn apply_override(doc: &mut toml::Table, assignment: &str) -> Result<()> {
    let assignment = assignment.trim_start_matches("--");
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::InvalidConfig(format!("override `{assignment}` is not key=value")))?;
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::InvalidConfig(format!("override key `{key}` is malformed")));
    }
    let mut table = doc;
    for p in &parts[..parts.len() - 1] {
        let entry = table.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| Error::InvalidConfig(format!("override `{key}`: `{p}` is not a table")))?;
    }
    table.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

const DOCS: &[(&str, &str)] = &[
    ("seed", "Seed of the first trial; trial i uses seed + i."),
    ("output_dir", "Root of all outputs (overridden by the VERGO_OUTPUT_ROOT environment variable)."),
    ("task", "Which suite to run and how many trials."),
    ("task.suite", "One of q1, erasing, ground, aerial."),
    ("task.method", "vec (volumetric footprint) or baseline (point footprint); `bench` runs both."),
    ("task.n_trials", "Number of seeded trials per method in `bench`."),
    ("task.truncation_factor", "Trials stop at this multiple of the suite budget."),
    ("basis", "Cosine basis."),
    ("basis.modes_per_dim", "Modes per dimension K (indices 0..K-1)."),
    ("basis.quadrature_cells", "Midpoint cells per dimension for target coefficients (at least 2K)."),
    ("controller", "Receding-horizon iLQR."),
    ("controller.horizon", "Planning horizon H in steps (at least 2)."),
    ("controller.planar_dt", "Step length for the double integrator and differential drive [s]."),
    ("controller.aerial_dt", "Step length for the quadcopter [s]."),
    ("controller.boundary_weight", "Weight of the quadratic penalty keeping the robot inside the space."),
    ("controller.boundary_margin", "Inset of the penalty box from the space boundary [m]."),
    ("controller.ilqr", "Solver settings."),
    ("controller.ilqr.max_iters", "Iterations per plan."),
    ("controller.ilqr.tolerance", "Stop when the relative cost decrease falls below this."),
    ("controller.ilqr.line_search", "Backtracking on the feedforward scale."),
    ("controller.ilqr.line_search.shrink", "Backtracking factor in (0, 1)."),
    ("controller.ilqr.line_search.max_trials", "Step sizes tried per iteration."),
    ("controller.ilqr.line_search.armijo", "Fraction of the predicted decrease that must be realized."),
    ("controller.ilqr.regularization", "Levenberg term added to the value Hessian."),
    ("controller.ilqr.regularization.initial", "Starting value."),
    ("controller.ilqr.regularization.min", "Values below this snap to zero."),
    ("controller.ilqr.regularization.max", "Exceeding this marks the plan degraded."),
    ("controller.ilqr.regularization.factor", "Growth and shrink factor."),
    ("erasing", "Erasing benchmark: double integrator carrying a rigid tool."),
    ("erasing.space", "Side lengths of the workspace [m]."),
    ("erasing.budget", "Step budget."),
    ("erasing.tool_shapes", "Tool shapes (bundled name or CSV of body points); trial i uses entry i mod len."),
    ("erasing.tool_half_extent", "Half side of the square a bundled tool shape is scaled to [m]."),
    ("erasing.tool_spacing", "Grid spacing of tool samples [m]."),
    ("erasing.target_shapes", "Target masks (bundled name, PGM or CSV grid); trial i uses entry i mod len."),
    ("erasing.mask_resolution", "Cells per side of a bundled target mask."),
    ("erasing.mask_fill", "Fraction of each side a bundled mask occupies."),
    ("erasing.erase_radius", "A target point is erased when a tool sample comes this close [m]."),
    ("search", "Ground and aerial search benchmarks."),
    ("search.ground_space", "Side lengths of the ground-robot space [m]."),
    ("search.aerial_space", "Side lengths of the ground plane searched from the air [m]."),
    ("search.ground_budget", "Step budget of the ground search."),
    ("search.aerial_budget", "Step budget of the aerial search."),
    ("search.ground_detection_radius", "A target is found when a LiDAR sample comes this close [m]."),
    ("search.aerial_detection_radius", "A target is found when a camera sample comes this close [m]."),
    ("search.weights", "Fixed mixture weights of the prior; one component per entry."),
    ("search.eigen_min", "Smallest covariance eigenvalue as a fraction of L^2."),
    ("search.eigen_max", "Largest covariance eigenvalue as a fraction of L^2."),
    ("search.inner_fraction", "Means and start positions are drawn from this central fraction of the space."),
    ("search.n_targets", "Hidden targets drawn from the prior."),
    ("q1", "Metric-decrease runs on all three platforms."),
    ("q1.steps", "Steps per run."),
    ("double_integrator", "Planar double integrator with heading."),
    ("double_integrator.max_linear_accel", "Bound on |ax| and |ay| [m/s^2]."),
    ("double_integrator.max_angular_accel", "Bound on the heading acceleration [rad/s^2]."),
    ("double_integrator.control_weight", "Diagonal of R."),
    ("diff_drive", "Differential drive with acceleration inputs."),
    ("diff_drive.max_accel", "Bound on the forward acceleration [m/s^2]."),
    ("diff_drive.max_angular_accel", "Bound on the turn-rate acceleration [rad/s^2]."),
    ("diff_drive.control_weight", "Diagonal of R."),
    ("quadcopter", "Rigid-body quadcopter with thrust and torque inputs."),
    ("quadcopter.mass", "Mass [kg]."),
    ("quadcopter.inertia", "Diagonal body inertia [kg m^2]."),
    ("quadcopter.gravity", "Gravitational acceleration [m/s^2]."),
    ("quadcopter.max_thrust_factor", "Thrust upper bound as a multiple of m g."),
    ("quadcopter.max_torque", "Bound on each body torque [N m]."),
    ("quadcopter.control_weight", "Diagonal of R, applied to the deviation from hover."),
    ("quadcopter.initial_altitude", "Start altitude [m]."),
    ("quadcopter.altitude_bounds", "Altitude band enforced by the boundary penalty [m]."),
    ("quadcopter.max_tilt_deg", "Roll and pitch bound enforced by the boundary penalty [deg]."),
    ("lidar", "Forward LiDAR wedge of the ground robot."),
    ("lidar.fov_deg", "Opening angle [deg]."),
    ("lidar.range_fraction", "Maximum range as a fraction of the shortest side of the space."),
    ("lidar.min_range_fraction", "Minimum range as a fraction of the maximum range."),
    ("lidar.n_radial", "Samples along each beam."),
    ("lidar.n_angular", "Beams across the wedge."),
    ("camera", "Downward camera of the quadcopter."),
    ("camera.hfov_deg", "Horizontal field of view [deg]."),
    ("camera.vfov_deg", "Vertical field of view [deg]."),
    ("camera.n_u", "Pixels across."),
    ("camera.n_v", "Pixels down."),
    ("camera.tilt_deg", "Forward pitch of the optical axis from nadir [deg]."),
    ("camera.clip_range", "Rays are cut at this length if they miss the ground earlier [m]."),
    ("output", "What each trial writes."),
    ("output.timing", "Record per-step wall time (makes outputs non-reproducible)."),
    ("output.trajectories", "Write executed states per trial."),
    ("output.footprints", "Write footprint samples for every executed state."),
];

fn doc_for(path: &str) -> Option<&'static str> {
    DOCS.iter().find(|(k, _)| *k == path).map(|(_, d)| *d)
}

/// Default configuration rendered as commented TOML.
pub fn reference_document() -> String {
    let value = toml::Table::try_from(RunConfig::default()).expect("defaults serialize");
    let mut out = String::from("# Reference configuration with all defaults.\n\n");
    render_table(&mut out, "", &value);
    out
}

fn render_table(out: &mut String, prefix: &str, table: &toml::Table) {
    let mut subtables = Vec::new();
    for (k, v) in table {
        let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            toml::Value::Table(t) => subtables.push((path, t)),
            _ => {
                if let Some(d) = doc_for(&path) {
                    out.push_str(&format!("# {d}\n"));
                }
                out.push_str(&format!("{k} = {v}\n"));
            }
        }
    }
    for (path, t) in subtables {
        out.push('\n');
        if let Some(d) = doc_for(&path) {
            out.push_str(&format!("# {d}\n"));
        }
        out.push_str(&format!("[{path}]\n"));
        render_table(out, &path, t);
    }
}

/// Dotted paths of every key in the default document.
pub fn default_keys() -> Vec<String> {
    fn walk(prefix: &str, t: &toml::Table, out: &mut Vec<String>) {
        for (k, v) in t {
            let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
            if let toml::Value::Table(sub) = v {
                walk(&path, sub, out);
            }
            out.push(path);
        }
    }
    let mut out = Vec::new();
    walk("", &toml::Table::try_from(RunConfig::default()).expect("defaults serialize"), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_documented() {
        RunConfig::default().validate().unwrap();
        for key in default_keys() {
            assert!(doc_for(&key).is_some(), "undocumented key {key}");
        }
    }

    #[test]
    fn reference_parses_back_to_defaults() {
        let cfg = RunConfig::from_toml_str(&reference_document(), &[]).unwrap();
        assert_eq!(cfg, RunConfig::default());
        let echo = RunConfig::from_toml_str(&cfg.to_toml(), &[]).unwrap();
        assert_eq!(echo, cfg);
    }

    #[test]
    fn overrides_and_unknown_keys() {
        let cfg = RunConfig::from_toml_str(
            "",
            &["--controller.ilqr.max_iters=4".into(), "task.suite=ground".into(), "erasing.space=[2.0, 1.0]".into()],
        )
        .unwrap();
        assert_eq!(cfg.controller.ilqr.max_iters, 4);
        assert_eq!(cfg.task.suite, Suite::Ground);
        assert_eq!(cfg.erasing.space, vec![2.0, 1.0]);
        let err = RunConfig::from_toml_str("[controller]\nhorizn = 3\n", &[]).unwrap_err();
        assert!(err.to_string().contains("horizn"), "{err}");
        let err = RunConfig::from_toml_str("", &["controller.horizon=0".into()]).unwrap_err();
        assert!(err.to_string().contains("controller.horizon"), "{err}");
        let err = RunConfig::from_toml_str("seed = \n", &[]).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }
}
