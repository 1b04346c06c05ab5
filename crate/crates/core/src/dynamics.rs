//! Platform models: continuous dynamics, RK4 stepping and linearization.
//!
//! State layouts:
//!
//! | platform | state | control |
//! |---|---|---|
//! | double integrator | `[x, y, θ, ẋ, ẏ, θ̇]` | `[a_x, a_y, a_θ]` |
//! | differential drive | `[x, y, θ, v, ω]` | `[a, α]` |
//! | quadcopter | `[p_x, p_y, p_z, φ, θ, ψ, v_x, v_y, v_z, ω_x, ω_y, ω_z]` | `[thrust, τ_x, τ_y, τ_z]` |
//!
//! The quadcopter uses ZYX Euler angles with body rates and a world-frame
//! velocity.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Platform tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Platform {
    DoubleIntegrator,
    DiffDrive,
    Quadcopter,
}

impl Platform {
    pub fn state_dim(self) -> usize {
        match self {
            Self::DoubleIntegrator => 6,
            Self::DiffDrive => 5,
            Self::Quadcopter => 12,
        }
    }

    pub fn control_dim(self) -> usize {
        match self {
            Self::DoubleIntegrator => 3,
            Self::DiffDrive => 2,
            Self::Quadcopter => 4,
        }
    }
}

impl std::fmt::Display for Platform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::DoubleIntegrator => "double-integrator",
            Self::DiffDrive => "diff-drive",
            Self::Quadcopter => "quadcopter",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadcopterParams<T> {
    pub mass: T,
    /// Diagonal of the body inertia.
    pub inertia: [T; 3],
    pub gravity: T,
}

impl<T: Scalar> Default for QuadcopterParams<T> {
    fn default() -> Self {
        Self { mass: T::one(), inertia: [T::lit(0.01), T::lit(0.01), T::lit(0.02)], gravity: T::lit(9.81) }
    }
}

/// Continuous dynamics with box control bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsModel<T> {
    platform: Platform,
    quad: QuadcopterParams<T>,
    control_lower: Vec<T>,
    control_upper: Vec<T>,
    nominal_control: Vec<T>,
}

/// Pitch beyond which the Euler parameterization is rejected.
fn pitch_guard<T: Scalar>() -> T {
    T::FRAC_PI_2() - T::lit(1e-3)
}

impl<T: Scalar> DynamicsModel<T> {
    fn with_bounds(platform: Platform, quad: QuadcopterParams<T>, lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        if lower.len() != platform.control_dim() || upper.len() != platform.control_dim() {
            return Err(Error::DimensionMismatch { expected: platform.control_dim(), got: lower.len() });
        }
        if lower.iter().chain(&upper).any(|v| !v.is_finite()) || lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(Error::InvalidModel("control bounds must be finite with lower ≤ upper".into()));
        }
        let nominal_control = match platform {
            Platform::Quadcopter => {
                let mut u = vec![T::zero(); 4];
                u[0] = quad.mass * quad.gravity;
                u
            }
            _ => vec![T::zero(); platform.control_dim()],
        };
        Ok(Self { platform, quad, control_lower: lower, control_upper: upper, nominal_control })
    }

    /// Planar position/orientation double integrator with symmetric bounds.
    pub fn double_integrator(max_linear_accel: T, max_angular_accel: T) -> Result<Self> {
        let upper = vec![max_linear_accel, max_linear_accel, max_angular_accel];
        let lower = upper.iter().map(|v| -*v).collect();
        Self::with_bounds(Platform::DoubleIntegrator, QuadcopterParams::default(), lower, upper)
    }

    /// Second-order unicycle.
    pub fn diff_drive(max_accel: T, max_angular_accel: T) -> Result<Self> {
        let upper = vec![max_accel, max_angular_accel];
        let lower = upper.iter().map(|v| -*v).collect();
        Self::with_bounds(Platform::DiffDrive, QuadcopterParams::default(), lower, upper)
    }

    /// Quadcopter with thrust in `[0, max_thrust]` and `|τ_i| ≤ max_torque`.
    pub fn quadcopter(params: QuadcopterParams<T>, max_thrust: T, max_torque: T) -> Result<Self> {
        if !(params.mass > T::zero()) || params.inertia.iter().any(|j| !(*j > T::zero())) {
            return Err(Error::InvalidModel("mass and inertia must be positive".into()));
        }
        let lower = vec![T::zero(), -max_torque, -max_torque, -max_torque];
        let upper = vec![max_thrust, max_torque, max_torque, max_torque];
        Self::with_bounds(Platform::Quadcopter, params, lower, upper)
    }

    /// Quadcopter with the default parameters: 1 kg, thrust up to `2 m g`, 0.1 N·m torque.
    pub fn default_quadcopter() -> Self {
        let p = QuadcopterParams::default();
        let max_thrust = T::lit(2.0) * p.mass * p.gravity;
        Self::quadcopter(p, max_thrust, T::lit(0.1)).expect("default quadcopter is valid")
    }

    pub fn platform(&self) -> Platform {
        self.platform
    }

    pub fn state_dim(&self) -> usize {
        self.platform.state_dim()
    }

    pub fn control_dim(&self) -> usize {
        self.platform.control_dim()
    }

    pub fn quad_params(&self) -> &QuadcopterParams<T> {
        &self.quad
    }

    pub fn control_lower(&self) -> &[T] {
        &self.control_lower
    }

    pub fn control_upper(&self) -> &[T] {
        &self.control_upper
    }

    /// Trim control: zero for the planar platforms, hover thrust for the quadcopter.
    pub fn nominal_control(&self) -> &[T] {
        &self.nominal_control
    }

    /// Indices of `(x, y, heading)` in the state.
    pub fn planar_pose_indices(&self) -> [usize; 3] {
        match self.platform {
            Platform::DoubleIntegrator | Platform::DiffDrive => [0, 1, 2],
            Platform::Quadcopter => [0, 1, 5],
        }
    }

    /// Indices of the position components (2 for planar robots, 3 for the quadcopter).
    pub fn position_indices(&self) -> &'static [usize] {
        match self.platform {
            Platform::DoubleIntegrator | Platform::DiffDrive => &[0, 1],
            Platform::Quadcopter => &[0, 1, 2],
        }
    }

    /// Indices of `(p_x, p_y, p_z, φ, θ, ψ)`; only the quadcopter carries a 3-D pose.
    pub fn spatial_pose_indices(&self) -> Option<[usize; 6]> {
        match self.platform {
            Platform::Quadcopter => Some([0, 1, 2, 3, 4, 5]),
            _ => None,
        }
    }

    pub fn planar_pose(&self, s: &[T]) -> [T; 3] {
        let [a, b, c] = self.planar_pose_indices();
        [s[a], s[b], s[c]]
    }

    pub fn clamp_control(&self, u: &[T]) -> Vec<T> {
        u.iter()
            .zip(&self.control_lower)
            .zip(&self.control_upper)
            .map(|((&v, &lo), &hi)| v.max(lo).min(hi))
            .collect()
    }

    fn check_layout(&self, s: &[T], u: &[T]) -> Result<()> {
        if s.len() != self.state_dim() {
            return Err(Error::DimensionMismatch { expected: self.state_dim(), got: s.len() });
        }
        if u.len() != self.control_dim() {
            return Err(Error::DimensionMismatch { expected: self.control_dim(), got: u.len() });
        }
        if s.iter().chain(u).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("state or control"));
        }
        Ok(())
    }

    /// `ṡ = f(s, u)` without control clamping.
    pub fn derivative(&self, s: &[T], u: &[T]) -> Result<Vec<T>> {
        self.check_layout(s, u)?;
        let mut out = vec![T::zero(); self.state_dim()];
        self.rhs(s, u, &mut out);
        Ok(out)
    }

    fn rhs(&self, s: &[T], u: &[T], out: &mut [T]) {
        match self.platform {
            Platform::DoubleIntegrator => {
                out[..3].copy_from_slice(&s[3..6]);
                out[3..6].copy_from_slice(&u[..3]);
            }
            Platform::DiffDrive => {
                let (sin, cos) = s[2].sin_cos();
                out[0] = s[3] * cos;
                out[1] = s[3] * sin;
                out[2] = s[4];
                out[3] = u[0];
                out[4] = u[1];
            }
            Platform::Quadcopter => {
                let q = &self.quad;
                let (sphi, cphi) = s[3].sin_cos();
                let (sth, cth) = s[4].sin_cos();
                let (spsi, cpsi) = s[5].sin_cos();
                let (wx, wy, wz) = (s[9], s[10], s[11]);
                out[0] = s[6];
                out[1] = s[7];
                out[2] = s[8];
                let tth = sth / cth;
                out[3] = wx + sphi * tth * wy + cphi * tth * wz;
                out[4] = cphi * wy - sphi * wz;
                out[5] = (sphi * wy + cphi * wz) / cth;
                let a = u[0] / q.mass;
                out[6] = a * (cphi * sth * cpsi + sphi * spsi);
                out[7] = a * (cphi * sth * spsi - sphi * cpsi);
                out[8] = a * (cphi * cth) - q.gravity;
                let [jx, jy, jz] = q.inertia;
                out[9] = (u[1] - (jz - jy) * wy * wz) / jx;
                out[10] = (u[2] - (jx - jz) * wz * wx) / jy;
                out[11] = (u[3] - (jy - jx) * wx * wy) / jz;
            }
        }
    }

    /// One RK4 step with zero-order hold and no clamping or wrapping.
    fn rk4_raw(&self, s: &[T], u: &[T], dt: T) -> Vec<T> {
        let n = s.len();
        let half = dt * T::lit(0.5);
        let mut k1 = vec![T::zero(); n];
        let mut k2 = vec![T::zero(); n];
        let mut k3 = vec![T::zero(); n];
        let mut k4 = vec![T::zero(); n];
        let mut tmp = vec![T::zero(); n];
        self.rhs(s, u, &mut k1);
        for i in 0..n {
            tmp[i] = s[i] + half * k1[i];
        }
        self.rhs(&tmp, u, &mut k2);
        for i in 0..n {
            tmp[i] = s[i] + half * k2[i];
        }
        self.rhs(&tmp, u, &mut k3);
        for i in 0..n {
            tmp[i] = s[i] + dt * k3[i];
        }
        self.rhs(&tmp, u, &mut k4);
        let sixth = dt / T::lit(6.0);
        (0..n).map(|i| s[i] + sixth * (k1[i] + T::lit(2.0) * (k2[i] + k3[i]) + k4[i])).collect()
    }

    fn check_attitude(&self, s: &[T]) -> Result<()> {
        if self.platform == Platform::Quadcopter && s[4].abs() >= pitch_guard() {
            return Err(Error::GimbalLock(s[4].to_f64_lossy()));
        }
        Ok(())
    }

    /// Classical RK4 with the control clamped into its box; the
    /// differential-drive heading is wrapped into `(−π, π]` afterwards.
    pub fn step_rk4(&self, s: &[T], u: &[T], dt: T) -> Result<Vec<T>> {
        self.check_layout(s, u)?;
        if !(dt > T::zero()) {
            return Err(Error::InvalidModel("dt must be positive".into()));
        }
        self.check_attitude(s)?;
        let u = self.clamp_control(u);
        let mut next = self.rk4_raw(s, &u, dt);
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("integrated state"));
        }
        self.check_attitude(&next)?;
        if self.platform == Platform::DiffDrive {
            next[2] = wrap_angle(next[2]);
        }
        Ok(next)
    }

    /// Discrete-time Jacobians of the RK4 step by central differences.
    pub fn linearize(&self, s: &[T], u: &[T], dt: T) -> Result<(DMatrix<T>, DMatrix<T>)> {
        self.check_layout(s, u)?;
        self.check_attitude(s)?;
        let n = self.state_dim();
        let m = self.control_dim();
        let h = T::fd_step();
        let inv = T::one() / (T::lit(2.0) * h);
        let mut a = DMatrix::zeros(n, n);
        let mut b = DMatrix::zeros(n, m);
        let mut sp = s.to_vec();
        for j in 0..n {
            sp[j] = s[j] + h;
            let fp = self.rk4_raw(&sp, u, dt);
            sp[j] = s[j] - h;
            let fm = self.rk4_raw(&sp, u, dt);
            sp[j] = s[j];
            for i in 0..n {
                a[(i, j)] = (fp[i] - fm[i]) * inv;
            }
        }
        let mut up = u.to_vec();
        for j in 0..m {
            up[j] = u[j] + h;
            let fp = self.rk4_raw(s, &up, dt);
            up[j] = u[j] - h;
            let fm = self.rk4_raw(s, &up, dt);
            up[j] = u[j];
            for i in 0..n {
                b[(i, j)] = (fp[i] - fm[i]) * inv;
            }
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("linearization"));
        }
        Ok((a, b))
    }

    /// Closed-form discrete Jacobians; only available for the double integrator.
    pub fn linearize_analytic(&self, dt: T) -> Option<(DMatrix<T>, DMatrix<T>)> {
        if self.platform != Platform::DoubleIntegrator {
            return None;
        }
        let mut a = DMatrix::identity(6, 6);
        let mut b = DMatrix::zeros(6, 3);
        for i in 0..3 {
            a[(i, i + 3)] = dt;
            b[(i, i)] = dt * dt * T::lit(0.5);
            b[(i + 3, i)] = dt;
        }
        Some((a, b))
    }
}

/// Wraps into `(−π, π]`.
pub fn wrap_angle<T: Scalar>(a: T) -> T {
    let two_pi = T::TAU();
    let mut r = a % two_pi;
    if r > T::PI() {
        r -= two_pi;
    } else if r <= -T::PI() {
        r += two_pi;
    }
    r
}

/// World-from-body rotation for ZYX Euler angles, row-major.
pub fn euler_zyx_rotation<T: Scalar>(roll: T, pitch: T, yaw: T) -> [[T; 3]; 3] {
    let (sr, cr) = roll.sin_cos();
    let (sp, cp) = pitch.sin_cos();
    let (sy, cy) = yaw.sin_cos();
    [
        [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
        [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
        [-sp, cp * sr, cp * cr],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn diff_drive_equilibrium_and_heading() {
        let m = DynamicsModel::diff_drive(1.0, 3.0).unwrap();
        assert_eq!(m.derivative(&[0.3, 0.2, 1.0, 0.0, 0.0], &[0.0, 0.0]).unwrap(), vec![0.0; 5]);
        let d = m.derivative(&[0.0, 0.0, PI / 2.0, 1.0, 0.0], &[0.0, 0.0]).unwrap();
        assert!(d[0].abs() < 1e-15 && (d[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quadcopter_hover_is_fixed_point() {
        let m = DynamicsModel::<f64>::default_quadcopter();
        let mut s = vec![0.0; 12];
        s[0] = 0.4;
        s[2] = 1.0;
        let u = m.nominal_control().to_vec();
        assert!(m.derivative(&s, &u).unwrap().iter().all(|v| v.abs() < 1e-15));
        let mut x = s.clone();
        for _ in 0..100 {
            x = m.step_rk4(&x, &u, 0.05).unwrap();
        }
        for (a, b) in x.iter().zip(&s) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn double_integrator_rk4_exact() {
        let m = DynamicsModel::double_integrator(1.0, 1.0).unwrap();
        let s = m.step_rk4(&[0.0, 0.0, 0.0, 1.0, 0.0, 0.0], &[0.0; 3], 0.1).unwrap();
        assert_eq!(s[0], 0.1);
        let s2: Vec<f64> = m.step_rk4(&[0.0; 6], &[0.5, -0.25, 1.0], 0.1).unwrap();
        assert!((s2[0] - 0.5 * 0.5 * 0.01).abs() < 1e-16);
        assert!((s2[4] + 0.025).abs() < 1e-16);
    }

    #[test]
    fn control_clamping_at_boundary() {
        let m = DynamicsModel::diff_drive(1.0, 2.0).unwrap();
        let s = [0.1, 0.2, 0.3, 0.4, 0.5];
        assert_eq!(m.step_rk4(&s, &[5.0, -9.0], 0.1).unwrap(), m.step_rk4(&s, &[1.0, -2.0], 0.1).unwrap());
    }

    #[test]
    fn heading_wrapped() {
        let m = DynamicsModel::diff_drive(1.0, 2.0).unwrap();
        let s: Vec<f64> = m.step_rk4(&[0.0, 0.0, PI - 0.01, 0.0, 1.0], &[0.0, 0.0], 0.1).unwrap();
        assert!(s[2] <= PI && s[2] > -PI && s[2] < 0.0);
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12f64);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-12f64);
    }

    #[test]
    fn errors() {
        let m = DynamicsModel::diff_drive(1.0, 2.0).unwrap();
        assert!(m.derivative(&[f64::NAN, 0.0, 0.0, 0.0, 0.0], &[0.0, 0.0]).is_err());
        assert!(m.step_rk4(&[0.0; 4], &[0.0, 0.0], 0.1).is_err());
        assert!(m.step_rk4(&[0.0; 5], &[0.0, 0.0], 0.0).is_err());
        let q = DynamicsModel::<f64>::default_quadcopter();
        let mut s = vec![0.0; 12];
        s[4] = 1.6;
        assert!(matches!(q.step_rk4(&s, q.nominal_control(), 0.05), Err(Error::GimbalLock(_))));
    }

    #[test]
    fn double_integrator_linearization_matches_closed_form() {
        let m = DynamicsModel::double_integrator(1.0, 1.0).unwrap();
        let (a, b) = m.linearize(&[0.1, 0.2, 0.3, 0.4, -0.5, 0.6], &[0.1, 0.2, -0.3], 0.1).unwrap();
        let (ae, be) = m.linearize_analytic(0.1).unwrap();
        assert!((a - ae).abs().max() < 1e-8);
        assert!((b - be).abs().max() < 1e-8);
    }

    #[test]
    fn rotation_is_orthonormal() {
        let r = euler_zyx_rotation(0.3, -0.2, 1.1);
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| r[k][i] * r[k][j]).sum();
                assert!((dot - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }
}
