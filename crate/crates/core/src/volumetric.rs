//! Sample-based volumetric state representations.
//!
//! A model maps a robot state to `N` points of the search space; the
//! volumetric basis value of a state is the mean of the cosine basis over
//! those points. Rigid footprints, the LiDAR wedge (a rigid transform of a
//! fixed polar grid) and the point model carry analytic Jacobians; the camera
//! is differentiated numerically over the pose components it reads.

use serde::{Deserialize, Serialize};

use crate::dynamics::{euler_zyx_rotation, DynamicsModel};
use crate::error::{Error, Result};
use crate::metric::FeatureMap;
use crate::scalar::Scalar;
use crate::spatial::{BasisSet, BasisWorkspace, ModeIndex, SearchSpace};

/// Rigid 2-D footprint placed at `R(θ) p_i + (x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidBodyParams<T> {
    /// Body-frame points relative to the pivot.
    pub body_points: Vec<[T; 2]>,
}

/// Forward-facing planar wedge sampled on a polar grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LidarWedgeParams<T> {
    /// Full opening angle.
    pub fov: T,
    pub max_range: T,
    pub min_range: T,
    pub n_radial: usize,
    pub n_angular: usize,
}

impl<T: Scalar> LidarWedgeParams<T> {
    /// 120° wedge with `min_range = 0.01 · max_range` on a 40 × 25 grid.
    pub fn with_range(max_range: T) -> Self {
        Self {
            fov: T::lit(120f64.to_radians()),
            max_range,
            min_range: T::lit(0.01) * max_range,
            n_radial: 40,
            n_angular: 25,
        }
    }
}

/// Pinhole camera whose pixel rays are intersected with the ground plane `z = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaycastCameraParams<T> {
    pub hfov: T,
    pub vfov: T,
    pub n_u: usize,
    pub n_v: usize,
    /// Forward pitch of the optical axis away from nadir.
    pub tilt: T,
    /// Rays are truncated at this distance when they miss the ground earlier.
    pub clip_range: T,
}

impl<T: Scalar> Default for RaycastCameraParams<T> {
    fn default() -> Self {
        Self {
            hfov: T::lit(60f64.to_radians()),
            vfov: T::lit(45f64.to_radians()),
            n_u: 40,
            n_v: 25,
            tilt: T::lit(20f64.to_radians()),
            clip_range: T::lit(3.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum VolumetricModel<T> {
    /// Identity projection of the robot position.
    Point,
    RigidBody(RigidBodyParams<T>),
    LidarWedge { params: LidarWedgeParams<T>, local: Vec<[T; 2]> },
    RaycastCamera { params: RaycastCameraParams<T>, rays: Vec<[T; 3]> },
}

/// Per-sample Jacobians restricted to the state columns a model reads.
///
/// `data` holds, for sample `i`, a `dims × cols.len()` row-major block.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleJacobians<T> {
    pub cols: Vec<usize>,
    pub dims: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> SampleJacobians<T> {
    pub fn num_samples(&self) -> usize {
        self.data.len() / (self.dims * self.cols.len()).max(1)
    }

    /// `∂h_i/∂s_col` component `row`.
    pub fn get(&self, sample: usize, row: usize, col: usize) -> T {
        let nc = self.cols.len();
        self.data[sample * self.dims * nc + row * nc + col]
    }

    /// Dense `dims × state_dim` matrix for one sample.
    pub fn dense(&self, sample: usize, state_dim: usize) -> Vec<Vec<T>> {
        let mut out = vec![vec![T::zero(); state_dim]; self.dims];
        for (row, r) in out.iter_mut().enumerate() {
            for (c, &col) in self.cols.iter().enumerate() {
                r[col] = self.get(sample, row, c);
            }
        }
        out
    }
}

impl<T: Scalar> VolumetricModel<T> {
    pub fn rigid_body(body_points: Vec<[T; 2]>) -> Result<Self> {
        if body_points.is_empty() {
            return Err(Error::InvalidModel("rigid body needs at least one point".into()));
        }
        if body_points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("body points"));
        }
        Ok(Self::RigidBody(RigidBodyParams { body_points }))
    }

    pub fn lidar(params: LidarWedgeParams<T>) -> Result<Self> {
        let p = &params;
        if !(p.fov > T::zero() && p.fov < T::TAU()) {
            return Err(Error::InvalidModel("lidar fov must lie in (0, 2π)".into()));
        }
        if !(p.min_range >= T::zero() && p.max_range > p.min_range) || p.n_radial == 0 || p.n_angular == 0 {
            return Err(Error::InvalidModel("lidar ranges/grid invalid".into()));
        }
        let half = p.fov * T::lit(0.5);
        let mut local = Vec::with_capacity(p.n_radial * p.n_angular);
        for i in 0..p.n_radial {
            let r = lerp(p.min_range, p.max_range, i, p.n_radial);
            for j in 0..p.n_angular {
                let a = lerp(-half, half, j, p.n_angular);
                let (s, c) = a.sin_cos();
                local.push([r * c, r * s]);
            }
        }
        Ok(Self::LidarWedge { params, local })
    }

    pub fn camera(params: RaycastCameraParams<T>) -> Result<Self> {
        let p = &params;
        let lim = T::PI() - T::lit(1e-6);
        if !(p.hfov > T::zero() && p.hfov < lim && p.vfov > T::zero() && p.vfov < lim) {
            return Err(Error::InvalidModel("camera fields of view must lie in (0, π)".into()));
        }
        if p.n_u == 0 || p.n_v == 0 || !(p.clip_range > T::zero()) {
            return Err(Error::InvalidModel("camera grid/clip range invalid".into()));
        }
        let tu = (p.hfov * T::lit(0.5)).tan();
        let tv = (p.vfov * T::lit(0.5)).tan();
        let (st, ct) = p.tilt.sin_cos();
        let mut rays = Vec::with_capacity(p.n_u * p.n_v);
        for j in 0..p.n_v {
            // image "up" points forward (+x body) before tilting
            let fv = pixel_center::<T>(j, p.n_v) * tv;
            for i in 0..p.n_u {
                // image "right" points to -y body
                let fu = pixel_center::<T>(i, p.n_u) * tu;
                let (x, y, z) = (fv, -fu, -T::one());
                let norm = (x * x + y * y + z * z).sqrt();
                let (x, y, z) = (x / norm, y / norm, z / norm);
                // pitch the optical axis forward: (0,0,-1) -> (sin t, 0, -cos t)
                rays.push([ct * x - st * z, y, st * x + ct * z]);
            }
        }
        Ok(Self::RaycastCamera { params, rays })
    }

    pub fn n_samples(&self) -> usize {
        match self {
            Self::Point => 1,
            Self::RigidBody(p) => p.body_points.len(),
            Self::LidarWedge { local, .. } => local.len(),
            Self::RaycastCamera { rays, .. } => rays.len(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Point => "point",
            Self::RigidBody(_) => "rigid-body",
            Self::LidarWedge { .. } => "lidar-wedge",
            Self::RaycastCamera { .. } => "raycast-camera",
        }
    }

    /// State columns the projection depends on.
    pub fn pose_columns(&self, dynamics: &DynamicsModel<T>, space: &SearchSpace<T>) -> Result<Vec<usize>> {
        match self {
            Self::Point => {
                let pos = dynamics.position_indices();
                if pos.len() < space.dims() {
                    return Err(Error::InvalidModel(format!(
                        "{} state has no {}-D position",
                        dynamics.platform(),
                        space.dims()
                    )));
                }
                Ok(pos[..space.dims()].to_vec())
            }
            Self::RigidBody(_) | Self::LidarWedge { .. } => {
                self.require_planar(space)?;
                Ok(dynamics.planar_pose_indices().to_vec())
            }
            Self::RaycastCamera { .. } => {
                self.require_planar(space)?;
                dynamics.spatial_pose_indices().map(|c| c.to_vec()).ok_or_else(|| {
                    Error::InvalidModel(format!("{} has no altitude for a ground camera", dynamics.platform()))
                })
            }
        }
    }

    fn require_planar(&self, space: &SearchSpace<T>) -> Result<()> {
        if space.dims() != 2 {
            return Err(Error::InvalidModel(format!("{} projects onto a 2-D search space", self.name())));
        }
        Ok(())
    }

    /// Writes unclamped sample points (flat, stride `space.dims()`).
    fn project_into(&self, dynamics: &DynamicsModel<T>, space: &SearchSpace<T>, s: &[T], out: &mut Vec<T>) -> Result<()> {
        if s.len() != dynamics.state_dim() {
            return Err(Error::DimensionMismatch { expected: dynamics.state_dim(), got: s.len() });
        }
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("state"));
        }
        out.clear();
        match self {
            Self::Point => {
                for &c in &self.pose_columns(dynamics, space)? {
                    out.push(s[c]);
                }
            }
            Self::RigidBody(RigidBodyParams { body_points: pts }) | Self::LidarWedge { local: pts, .. } => {
                self.require_planar(space)?;
                let [x, y, th] = dynamics.planar_pose(s);
                let (sn, cs) = th.sin_cos();
                for p in pts {
                    out.push(x + cs * p[0] - sn * p[1]);
                    out.push(y + sn * p[0] + cs * p[1]);
                }
            }
            Self::RaycastCamera { params, rays } => {
                let cols = self.pose_columns(dynamics, space)?;
                let (px, py, pz) = (s[cols[0]], s[cols[1]], s[cols[2]]);
                if !(pz > T::zero()) {
                    return Err(Error::CameraBelowGround(pz.to_f64_lossy()));
                }
                let r = euler_zyx_rotation(s[cols[3]], s[cols[4]], s[cols[5]]);
                for ray in rays {
                    let w = [
                        r[0][0] * ray[0] + r[0][1] * ray[1] + r[0][2] * ray[2],
                        r[1][0] * ray[0] + r[1][1] * ray[1] + r[1][2] * ray[2],
                        r[2][0] * ray[0] + r[2][1] * ray[1] + r[2][2] * ray[2],
                    ];
                    let t = if w[2] < T::zero() { (pz / -w[2]).min(params.clip_range) } else { params.clip_range };
                    out.push(px + t * w[0]);
                    out.push(py + t * w[1]);
                }
            }
        }
        Ok(())
    }

    /// Sample points before clamping into the search space.
    pub fn sample_points_unclamped(
        &self,
        dynamics: &DynamicsModel<T>,
        space: &SearchSpace<T>,
        s: &[T],
    ) -> Result<Vec<Vec<T>>> {
        let mut flat = Vec::new();
        self.project_into(dynamics, space, s, &mut flat)?;
        Ok(flat.chunks(space.dims()).map(|c| c.to_vec()).collect())
    }

    /// The `N` footprint points of state `s`, clamped into the search space.
    pub fn sample_points(&self, dynamics: &DynamicsModel<T>, space: &SearchSpace<T>, s: &[T]) -> Result<Vec<Vec<T>>> {
        let mut pts = self.sample_points_unclamped(dynamics, space, s)?;
        for p in &mut pts {
            space.clamp(p);
        }
        Ok(pts)
    }

    /// `∂h_i/∂s` for every sample, derivative of the clamp included.
    pub fn sample_jacobians(
        &self,
        dynamics: &DynamicsModel<T>,
        space: &SearchSpace<T>,
        s: &[T],
    ) -> Result<SampleJacobians<T>> {
        let mut flat = Vec::new();
        self.project_into(dynamics, space, s, &mut flat)?;
        let cols = self.pose_columns(dynamics, space)?;
        let d = space.dims();
        let nc = cols.len();
        let n = flat.len() / d;
        let mut data = vec![T::zero(); n * d * nc];
        match self {
            Self::Point => {
                for r in 0..d {
                    data[r * nc + r] = T::one();
                }
            }
            Self::RigidBody(RigidBodyParams { body_points: pts }) | Self::LidarWedge { local: pts, .. } => {
                let th = dynamics.planar_pose(s)[2];
                let (sn, cs) = th.sin_cos();
                for (i, p) in pts.iter().enumerate() {
                    let b = i * d * nc;
                    data[b] = T::one();
                    data[b + 2] = -sn * p[0] - cs * p[1];
                    data[b + nc + 1] = T::one();
                    data[b + nc + 2] = cs * p[0] - sn * p[1];
                }
            }
            Self::RaycastCamera { .. } => {
                self.finite_difference_jacobian(dynamics, space, s, &cols, &mut data)?;
            }
        }
        // zero rows along which the point was clamped
        let lengths = space.lengths();
        for i in 0..n {
            for r in 0..d {
                let v = flat[i * d + r];
                if v < T::zero() || v > lengths[r] {
                    for c in 0..nc {
                        data[i * d * nc + r * nc + c] = T::zero();
                    }
                }
            }
        }
        Ok(SampleJacobians { cols, dims: d, data })
    }

    fn finite_difference_jacobian(
        &self,
        dynamics: &DynamicsModel<T>,
        space: &SearchSpace<T>,
        s: &[T],
        cols: &[usize],
        data: &mut [T],
    ) -> Result<()> {
        self.finite_difference_jacobian_with_step(dynamics, space, s, cols, data, T::fd_step())
    }

    pub(crate) fn finite_difference_jacobian_with_step(
        &self,
        dynamics: &DynamicsModel<T>,
        space: &SearchSpace<T>,
        s: &[T],
        cols: &[usize],
        data: &mut [T],
        h: T,
    ) -> Result<()> {
        let d = space.dims();
        let nc = cols.len();
        let inv = T::one() / (T::lit(2.0) * h);
        let mut sp = s.to_vec();
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for (c, &col) in cols.iter().enumerate() {
            sp[col] = s[col] + h;
            self.project_into(dynamics, space, &sp, &mut plus)?;
            sp[col] = s[col] - h;
            self.project_into(dynamics, space, &sp, &mut minus)?;
            sp[col] = s[col];
            for i in 0..plus.len() / d {
                for r in 0..d {
                    data[i * d * nc + r * nc + c] = (plus[i * d + r] - minus[i * d + r]) * inv;
                }
            }
        }
        Ok(())
    }

    /// Finite-difference Jacobian with an explicit step, for step-halving checks.
    pub fn sample_jacobians_fd(
        &self,
        dynamics: &DynamicsModel<T>,
        space: &SearchSpace<T>,
        s: &[T],
        h: T,
    ) -> Result<SampleJacobians<T>> {
        let cols = self.pose_columns(dynamics, space)?;
        let d = space.dims();
        let mut data = vec![T::zero(); self.n_samples() * d * cols.len()];
        self.finite_difference_jacobian_with_step(dynamics, space, s, &cols, &mut data, h)?;
        Ok(SampleJacobians { cols, dims: d, data })
    }

    /// Ground area enclosed by the four corner rays (camera only).
    pub fn camera_footprint_area(&self, dynamics: &DynamicsModel<T>, space: &SearchSpace<T>, s: &[T]) -> Result<T> {
        let Self::RaycastCamera { params, .. } = self else {
            return Err(Error::InvalidModel("footprint area is defined for the camera model".into()));
        };
        let pts = self.sample_points_unclamped(dynamics, space, s)?;
        let (nu, nv) = (params.n_u, params.n_v);
        let corners = [0, nu - 1, nu * nv - 1, nu * (nv - 1)];
        let mut area = T::zero();
        for i in 0..4 {
            let a = &pts[corners[i]];
            let b = &pts[corners[(i + 1) % 4]];
            area += a[0] * b[1] - b[0] * a[1];
        }
        Ok((area * T::lit(0.5)).abs())
    }
}

fn lerp<T: Scalar>(a: T, b: T, i: usize, n: usize) -> T {
    if n == 1 {
        return (a + b) * T::lit(0.5);
    }
    a + (b - a) * T::from_usize_lossy(i) / T::from_usize_lossy(n - 1)
}

/// Normalized pixel-center coordinate in `(-1, 1)`.
fn pixel_center<T: Scalar>(i: usize, n: usize) -> T {
    (T::from_usize_lossy(2 * i + 1) / T::from_usize_lossy(n)) - T::one()
}

/// `f_k^v(s) = (1/N) Σ_i f_k(h_i(s))` for a single mode.
pub fn vol_basis<T: Scalar>(
    basis: &BasisSet<T>,
    model: &VolumetricModel<T>,
    dynamics: &DynamicsModel<T>,
    k: &ModeIndex,
    s: &[T],
) -> Result<T> {
    let pts = model.sample_points(dynamics, basis.space(), s)?;
    let mut acc = T::zero();
    for p in &pts {
        acc += basis.eval(k, p)?;
    }
    Ok(acc / T::from_usize_lossy(pts.len()))
}

/// `∂f_k^v/∂s = (1/N) Σ_i ∇f_k(h_i(s)) · ∂h_i/∂s`.
pub fn vol_basis_grad<T: Scalar>(
    basis: &BasisSet<T>,
    model: &VolumetricModel<T>,
    dynamics: &DynamicsModel<T>,
    k: &ModeIndex,
    s: &[T],
) -> Result<Vec<T>> {
    let space = basis.space();
    let pts = model.sample_points(dynamics, space, s)?;
    let jac = model.sample_jacobians(dynamics, space, s)?;
    let mut g = vec![T::zero(); dynamics.state_dim()];
    for (i, p) in pts.iter().enumerate() {
        let gx = basis.eval_grad(k, p)?;
        for (c, &col) in jac.cols.iter().enumerate() {
            for (r, &gr) in gx.iter().enumerate() {
                g[col] += gr * jac.get(i, r, c);
            }
        }
    }
    let n = T::from_usize_lossy(pts.len());
    Ok(g.into_iter().map(|v| v / n).collect())
}

/// Volumetric basis values of every mode, as consumed by the metric and controller.
#[derive(Debug, Clone, Copy)]
pub struct VolumetricFeatures<'a, T> {
    pub basis: &'a BasisSet<T>,
    pub model: &'a VolumetricModel<T>,
    pub dynamics: &'a DynamicsModel<T>,
}

impl<'a, T: Scalar> VolumetricFeatures<'a, T> {
    pub fn new(basis: &'a BasisSet<T>, model: &'a VolumetricModel<T>, dynamics: &'a DynamicsModel<T>) -> Result<Self> {
        model.pose_columns(dynamics, basis.space())?;
        Ok(Self { basis, model, dynamics })
    }
}

impl<T: Scalar> FeatureMap<T> for VolumetricFeatures<'_, T> {
    fn num_features(&self) -> usize {
        self.basis.len()
    }

    fn state_dim(&self) -> usize {
        self.dynamics.state_dim()
    }

    fn features(&self, s: &[T], out: &mut [T]) -> Result<()> {
        let space = self.basis.space();
        let d = space.dims();
        let mut flat = Vec::with_capacity(self.model.n_samples() * d);
        self.model.project_into(self.dynamics, space, s, &mut flat)?;
        let mut ws = BasisWorkspace::new(self.basis);
        let mut tmp = vec![T::zero(); self.basis.len()];
        out.iter_mut().for_each(|v| *v = T::zero());
        for p in flat.chunks(d) {
            self.basis.eval_all_into(&mut ws, p, &mut tmp);
            for (o, &v) in out.iter_mut().zip(&tmp) {
                *o += v;
            }
        }
        let inv = T::one() / T::from_usize_lossy(flat.len() / d);
        out.iter_mut().for_each(|v| *v *= inv);
        Ok(())
    }

    fn features_with_grad(&self, s: &[T], values: &mut [T], grads: &mut [T]) -> Result<()> {
        let space = self.basis.space();
        let d = space.dims();
        let n = self.dynamics.state_dim();
        let kk = self.basis.len();
        let mut flat = Vec::with_capacity(self.model.n_samples() * d);
        self.model.project_into(self.dynamics, space, s, &mut flat)?;
        let jac = self.model.sample_jacobians(self.dynamics, space, s)?;
        let nc = jac.cols.len();
        let mut ws = BasisWorkspace::new(self.basis);
        let mut v = vec![T::zero(); kk];
        let mut gx = vec![T::zero(); kk * d];
        values.iter_mut().for_each(|x| *x = T::zero());
        grads.iter_mut().for_each(|x| *x = T::zero());
        // gradient accumulated over the model's pose columns only
        let mut gcols = vec![T::zero(); kk * nc];
        for (i, p) in flat.chunks(d).enumerate() {
            self.basis.eval_all_with_grad_into(&mut ws, p, &mut v, &mut gx);
            for (o, &x) in values.iter_mut().zip(&v) {
                *o += x;
            }
            let jb = &jac.data[i * d * nc..(i + 1) * d * nc];
            for m in 0..kk {
                let g = &gx[m * d..(m + 1) * d];
                let row = &mut gcols[m * nc..(m + 1) * nc];
                for c in 0..nc {
                    let mut acc = g[0] * jb[c];
                    for r in 1..d {
                        acc += g[r] * jb[r * nc + c];
                    }
                    row[c] += acc;
                }
            }
        }
        let inv = T::one() / T::from_usize_lossy(flat.len() / d);
        values.iter_mut().for_each(|x| *x *= inv);
        for m in 0..kk {
            for (c, &col) in jac.cols.iter().enumerate() {
                grads[m * n + col] = gcols[m * nc + c] * inv;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn di() -> DynamicsModel<f64> {
        DynamicsModel::double_integrator(1.0, 1.0).unwrap()
    }

    fn quad_state(x: f64, y: f64, z: f64, roll: f64, pitch: f64, yaw: f64) -> Vec<f64> {
        let mut s = vec![0.0; 12];
        s[..6].copy_from_slice(&[x, y, z, roll, pitch, yaw]);
        s
    }

    #[test]
    fn point_model_identity() {
        let space = SearchSpace::unit_square();
        let s = [0.3, 0.7, 1.0, 0.0, 0.0, 0.0];
        let pts = VolumetricModel::Point.sample_points(&di(), &space, &s).unwrap();
        assert_eq!(pts, vec![vec![0.3, 0.7]]);
        let j = VolumetricModel::Point.sample_jacobians(&di(), &space, &s).unwrap();
        assert_eq!(j.dense(0, 6), vec![vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0]]);
    }

    #[test]
    fn rigid_pivot_fixed_under_rotation() {
        let space = SearchSpace::unit_square();
        let m = VolumetricModel::rigid_body(vec![[0.0, 0.0], [0.1, 0.0]]).unwrap();
        let pts = m.sample_points(&di(), &space, &[0.5, 0.5, FRAC_PI_2, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(pts[0], vec![0.5, 0.5]);
        assert!((pts[1][0] - 0.5).abs() < 1e-15 && (pts[1][1] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn rigid_rotation_derivative() {
        let space = SearchSpace::unit_square();
        let m = VolumetricModel::rigid_body(vec![[1.0, 0.0]]).unwrap();
        let s = [0.2, 0.5, 0.0, 0.0, 0.0, 0.0];
        let j = m.sample_jacobians(&di(), &SearchSpace::new(vec![5.0, 5.0]).unwrap(), &s).unwrap();
        assert_eq!(j.get(0, 0, 2), 0.0);
        assert_eq!(j.get(0, 1, 2), 1.0);
        // clamped sample (x = 1.2 > 1) loses its x row
        let j = m.sample_jacobians(&di(), &space, &s).unwrap();
        assert_eq!(j.get(0, 0, 0), 0.0);
        assert_eq!(j.get(0, 1, 1), 1.0);
    }

    #[test]
    fn camera_center_ray_ground_hit() {
        let space = SearchSpace::unit_square();
        let q = DynamicsModel::<f64>::default_quadcopter();
        let one = |tilt: f64| {
            VolumetricModel::camera(RaycastCameraParams { n_u: 1, n_v: 1, tilt, ..Default::default() }).unwrap()
        };
        let s = quad_state(0.4, 0.4, 1.0, 0.0, 0.0, 0.0);
        let p = one(0.0).sample_points(&q, &space, &s).unwrap();
        assert!((p[0][0] - 0.4).abs() < 1e-15 && (p[0][1] - 0.4).abs() < 1e-15);
        let big = SearchSpace::new(vec![10.0, 10.0]).unwrap();
        let tilted = one(20f64.to_radians());
        let p = tilted.sample_points(&q, &big, &s).unwrap();
        assert!((p[0][0] - 0.4 - 0.36397023426620234).abs() < 1e-12);
        assert!((p[0][1] - 0.4).abs() < 1e-12);
        // heading rotates the forward shift
        let s = quad_state(0.4, 0.4, 1.0, 0.0, 0.0, FRAC_PI_2);
        let p = tilted.sample_points(&q, &big, &s).unwrap();
        assert!((p[0][0] - 0.4).abs() < 1e-12 && (p[0][1] - 0.76397023426620234).abs() < 1e-12);
    }

    #[test]
    fn camera_errors_and_clipping() {
        let space = SearchSpace::unit_square();
        let q = DynamicsModel::<f64>::default_quadcopter();
        let cam = VolumetricModel::camera(RaycastCameraParams::default()).unwrap();
        assert!(matches!(
            cam.sample_points(&q, &space, &quad_state(0.5, 0.5, 0.0, 0.0, 0.0, 0.0)),
            Err(Error::CameraBelowGround(_))
        ));
        // rolled past horizontal: every ray truncated at the clip range, all samples still present
        let pts = cam.sample_points(&q, &space, &quad_state(0.5, 0.5, 0.5, PI * 0.9, 0.0, 0.0)).unwrap();
        assert_eq!(pts.len(), 1000);
        assert!(pts.iter().all(|p| space.contains(p)));
        assert!(cam.sample_points(&di(), &space, &[0.5; 6]).is_err());
    }

    #[test]
    fn lidar_layout() {
        let m = VolumetricModel::lidar(LidarWedgeParams::with_range(0.25)).unwrap();
        assert_eq!(m.n_samples(), 1000);
        let big = SearchSpace::new(vec![4.0f64, 4.0]).unwrap();
        let dd = DynamicsModel::diff_drive(1.0, 1.0).unwrap();
        let pts = m.sample_points(&dd, &big, &[2.0, 2.0, 0.0, 0.0, 0.0]).unwrap();
        for p in &pts {
            let (dx, dy) = (p[0] - 2.0, p[1] - 2.0);
            let r = (dx * dx + dy * dy).sqrt();
            assert!(r <= 0.25 + 1e-12 && r >= 0.0025 - 1e-12);
            assert!(dy.atan2(dx).abs() <= 60f64.to_radians() + 1e-12);
        }
        assert!(VolumetricModel::lidar(LidarWedgeParams { fov: 7.0, ..LidarWedgeParams::with_range(0.2) }).is_err());
    }

    #[test]
    fn rigid_body_requires_points() {
        assert!(VolumetricModel::<f64>::rigid_body(vec![]).is_err());
    }
}
