use serde::{Deserialize, Serialize};

use super::SearchSpace;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Multi-index `k` of a cosine mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeIndex(pub Vec<usize>);

impl ModeIndex {
    pub fn zero(dims: usize) -> Self {
        Self(vec![0; dims])
    }

    pub fn norm_squared(&self) -> usize {
        self.0.iter().map(|k| k * k).sum()
    }
}

impl From<&[usize]> for ModeIndex {
    fn from(v: &[usize]) -> Self {
        Self(v.to_vec())
    }
}

/// Truncated normalized cosine basis over a [`SearchSpace`].
///
/// Modes are stored in lexicographic order of their multi-index, with the
/// first component most significant, so `(0, …, 0)` comes first.
#[derive(Debug, Clone)]
pub struct BasisSet<T> {
    space: SearchSpace<T>,
    modes_per_dim: usize,
    indices: Vec<ModeIndex>,
    flat_indices: Vec<usize>,
    normalizers: Vec<T>,
    inv_normalizers: Vec<T>,
    weights: Vec<T>,
    // π / L_i
    wavenumbers: Vec<T>,
}

/// Reusable cosine/sine tables for bulk evaluation.
#[derive(Debug, Clone, Default)]
pub struct BasisWorkspace<T> {
    cos: Vec<T>,
    sin: Vec<T>,
    point: Vec<T>,
    outside: Vec<bool>,
}

impl<T: Scalar> BasisWorkspace<T> {
    pub fn new(basis: &BasisSet<T>) -> Self {
        let d = basis.dims();
        let k = basis.modes_per_dim;
        Self {
            cos: vec![T::zero(); d * k],
            sin: vec![T::zero(); d * k],
            point: vec![T::zero(); d],
            outside: vec![false; d],
        }
    }
}

impl<T: Scalar> BasisSet<T> {
    pub fn new(space: SearchSpace<T>, modes_per_dim: usize) -> Result<Self> {
        if modes_per_dim == 0 {
            return Err(Error::InvalidBasis("modes_per_dim must be at least 1".into()));
        }
        let d = space.dims();
        let count = modes_per_dim
            .checked_pow(d as u32)
            .ok_or_else(|| Error::InvalidBasis("too many modes".into()))?;
        let half = T::lit(0.5);
        let exponent = -(T::from_usize_lossy(d) + T::one()) * half;

        let mut indices = Vec::with_capacity(count);
        let mut flat_indices = Vec::with_capacity(count * d);
        let mut normalizers = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        for m in 0..count {
            let mut k = vec![0usize; d];
            let mut rem = m;
            for i in (0..d).rev() {
                k[i] = rem % modes_per_dim;
                rem /= modes_per_dim;
            }
            let mut h2 = T::one();
            for (&ki, &l) in k.iter().zip(space.lengths()) {
                h2 *= if ki == 0 { l } else { l * half };
            }
            let idx = ModeIndex(k);
            let w = (T::one() + T::from_usize_lossy(idx.norm_squared())).powf(exponent);
            flat_indices.extend_from_slice(&idx.0);
            normalizers.push(h2.sqrt());
            weights.push(w);
            indices.push(idx);
        }
        let inv_normalizers = normalizers.iter().map(|h| T::one() / *h).collect();
        let wavenumbers = space.lengths().iter().map(|&l| T::PI() / l).collect();
        Ok(Self {
            space,
            modes_per_dim,
            indices,
            flat_indices,
            normalizers,
            inv_normalizers,
            weights,
            wavenumbers,
        })
    }

    pub fn space(&self) -> &SearchSpace<T> {
        &self.space
    }

    pub fn dims(&self) -> usize {
        self.space.dims()
    }

    pub fn modes_per_dim(&self) -> usize {
        self.modes_per_dim
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[ModeIndex] {
        &self.indices
    }

    /// `h_k`, aligned with [`Self::indices`].
    pub fn normalizers(&self) -> &[T] {
        &self.normalizers
    }

    /// Sobolev weights `λ_k = (1 + |k|²)^{-(d+1)/2}`.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Position of `k` in the ordered index list.
    pub fn position(&self, k: &ModeIndex) -> Result<usize> {
        if k.0.len() != self.dims() || k.0.iter().any(|&ki| ki >= self.modes_per_dim) {
            return Err(Error::UnknownMode(k.0.clone()));
        }
        Ok(k.0.iter().fold(0, |acc, &ki| acc * self.modes_per_dim + ki))
    }

    fn clamped(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.dims() {
            return Err(Error::DimensionMismatch { expected: self.dims(), got: x.len() });
        }
        let mut p = x.to_vec();
        self.space.clamp(&mut p);
        Ok(p)
    }

    /// `f_k(x) = (1/h_k) ∏ cos(k_i π x_i / L_i)`, with `x` clamped into the box.
    pub fn eval(&self, k: &ModeIndex, x: &[T]) -> Result<T> {
        let m = self.position(k)?;
        let p = self.clamped(x)?;
        let mut v = self.inv_normalizers[m];
        for i in 0..self.dims() {
            v *= (T::from_usize_lossy(k.0[i]) * self.wavenumbers[i] * p[i]).cos();
        }
        Ok(v)
    }

    /// Spatial gradient `∂f_k/∂x`. Components along which `x` was clamped are zero.
    pub fn eval_grad(&self, k: &ModeIndex, x: &[T]) -> Result<Vec<T>> {
        let m = self.position(k)?;
        let p = self.clamped(x)?;
        let d = self.dims();
        let mut g = vec![T::zero(); d];
        for (i, gi) in g.iter_mut().enumerate() {
            if p[i] != x[i] {
                continue;
            }
            let ki = T::from_usize_lossy(k.0[i]);
            let mut v = -ki * self.wavenumbers[i] * (ki * self.wavenumbers[i] * p[i]).sin();
            for j in (0..d).filter(|&j| j != i) {
                v *= (T::from_usize_lossy(k.0[j]) * self.wavenumbers[j] * p[j]).cos();
            }
            *gi = v * self.inv_normalizers[m];
        }
        Ok(g)
    }

    fn fill_tables(&self, ws: &mut BasisWorkspace<T>, x: &[T]) {
        let d = self.dims();
        let km = self.modes_per_dim;
        for i in 0..d {
            let l = self.space.lengths()[i];
            let raw = x[i];
            let p = raw.max(T::zero()).min(l);
            ws.point[i] = p;
            ws.outside[i] = p != raw;
            let a = self.wavenumbers[i] * p;
            let (s1, c1) = a.sin_cos();
            let base = i * km;
            ws.cos[base] = T::one();
            ws.sin[base] = T::zero();
            if km > 1 {
                ws.cos[base + 1] = c1;
                ws.sin[base + 1] = s1;
            }
            for k in 2..km {
                let (cp, sp) = (ws.cos[base + k - 1], ws.sin[base + k - 1]);
                ws.cos[base + k] = cp * c1 - sp * s1;
                ws.sin[base + k] = sp * c1 + cp * s1;
            }
        }
    }

    /// Evaluates every mode at `x` (clamped) into `out`.
    pub fn eval_all_into(&self, ws: &mut BasisWorkspace<T>, x: &[T], out: &mut [T]) {
        debug_assert_eq!(out.len(), self.len());
        self.fill_tables(ws, x);
        let d = self.dims();
        let km = self.modes_per_dim;
        match d {
            2 => {
                let (c0, c1) = ws.cos.split_at(km);
                for a in 0..km {
                    let row = &mut out[a * km..(a + 1) * km];
                    let inv = &self.inv_normalizers[a * km..(a + 1) * km];
                    for b in 0..km {
                        row[b] = inv[b] * c0[a] * c1[b];
                    }
                }
            }
            _ => {
                for (m, v) in out.iter_mut().enumerate() {
                    let k = &self.flat_indices[m * d..(m + 1) * d];
                    let mut acc = self.inv_normalizers[m];
                    for i in 0..d {
                        acc *= ws.cos[i * km + k[i]];
                    }
                    *v = acc;
                }
            }
        }
    }

    /// Evaluates every mode and its spatial gradient at `x`. `grads` is
    /// `len() × dims()` row-major.
    pub fn eval_all_with_grad_into(
        &self,
        ws: &mut BasisWorkspace<T>,
        x: &[T],
        values: &mut [T],
        grads: &mut [T],
    ) {
        debug_assert_eq!(values.len(), self.len());
        debug_assert_eq!(grads.len(), self.len() * self.dims());
        self.fill_tables(ws, x);
        let d = self.dims();
        let km = self.modes_per_dim;
        match d {
            2 => {
                let (c0, c1) = ws.cos.split_at(km);
                let (s0, s1) = ws.sin.split_at(km);
                let w0 = self.wavenumbers[0];
                let w1 = self.wavenumbers[1];
                let live0 = if ws.outside[0] { T::zero() } else { T::one() };
                let live1 = if ws.outside[1] { T::zero() } else { T::one() };
                for a in 0..km {
                    let fa = T::from_usize_lossy(a) * w0;
                    let da = -fa * s0[a] * live0;
                    for b in 0..km {
                        let m = a * km + b;
                        let inv = self.inv_normalizers[m];
                        let fb = T::from_usize_lossy(b) * w1;
                        values[m] = inv * c0[a] * c1[b];
                        grads[2 * m] = inv * da * c1[b];
                        grads[2 * m + 1] = inv * c0[a] * (-fb * s1[b] * live1);
                    }
                }
            }
            _ => {
                for m in 0..self.len() {
                    let k = &self.flat_indices[m * d..(m + 1) * d];
                    let inv = self.inv_normalizers[m];
                    let mut acc = inv;
                    for i in 0..d {
                        acc *= ws.cos[i * km + k[i]];
                    }
                    values[m] = acc;
                    for i in 0..d {
                        let g = &mut grads[m * d + i];
                        if ws.outside[i] {
                            *g = T::zero();
                            continue;
                        }
                        let ki = T::from_usize_lossy(k[i]) * self.wavenumbers[i];
                        let mut v = inv * (-ki * ws.sin[i * km + k[i]]);
                        for j in (0..d).filter(|&j| j != i) {
                            v *= ws.cos[j * km + k[j]];
                        }
                        *g = v;
                    }
                }
            }
        }
    }

    /// Allocating convenience wrapper over [`Self::eval_all_into`].
    pub fn eval_all(&self, x: &[T]) -> Vec<T> {
        let mut ws = BasisWorkspace::new(self);
        let mut out = vec![T::zero(); self.len()];
        self.eval_all_into(&mut ws, x, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit(k: usize) -> BasisSet<f64> {
        BasisSet::new(SearchSpace::unit_square(), k).unwrap()
    }

    #[test]
    fn single_constant_mode() {
        let b = unit(1);
        assert_eq!(b.len(), 1);
        assert_eq!(b.indices()[0], ModeIndex(vec![0, 0]));
        assert_eq!(b.normalizers()[0], 1.0);
        assert_eq!(b.weights()[0], 1.0);
    }

    #[test]
    fn weight_and_normalizer_closed_forms() {
        let b = unit(4);
        let m = b.position(&ModeIndex(vec![1, 0])).unwrap();
        assert_relative_eq!(b.weights()[m], 2f64.powf(-1.5), epsilon = 1e-15);
        assert_relative_eq!(b.weights()[m], 0.353553390593, epsilon = 1e-12);
        assert_relative_eq!(b.normalizers()[m], 0.5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn lexicographic_order() {
        let b = unit(3);
        let order: Vec<Vec<usize>> = b.indices().iter().map(|k| k.0.clone()).collect();
        assert_eq!(order[0], vec![0, 0]);
        assert_eq!(order[1], vec![0, 1]);
        assert_eq!(order[3], vec![1, 0]);
        assert_eq!(order[8], vec![2, 2]);
    }

    #[test]
    fn eval_examples() {
        let b = unit(4);
        assert_eq!(b.eval(&ModeIndex(vec![0, 0]), &[0.37, 0.81]).unwrap(), 1.0);
        assert_relative_eq!(
            b.eval(&ModeIndex(vec![1, 0]), &[0.0, 0.3]).unwrap(),
            std::f64::consts::SQRT_2,
            epsilon = 1e-15
        );
        // direct scalar formula: h = sqrt(1/2 · 1/2) = 1/2
        let direct = 2.0 * (2.0 * std::f64::consts::PI * 0.25).cos() * (std::f64::consts::PI * 0.5).cos();
        assert_relative_eq!(b.eval(&ModeIndex(vec![2, 1]), &[0.25, 0.5]).unwrap(), direct, epsilon = 1e-15);
    }

    #[test]
    fn grad_examples() {
        let b = unit(4);
        assert_eq!(b.eval_grad(&ModeIndex(vec![0, 0]), &[0.2, 0.4]).unwrap(), vec![0.0, 0.0]);
        let g = b.eval_grad(&ModeIndex(vec![1, 0]), &[0.5, 0.1]).unwrap();
        assert_relative_eq!(g[0], -4.442882938158366, epsilon = 1e-12);
        assert_eq!(g[1].abs(), 0.0);
    }

    #[test]
    fn unknown_mode_rejected() {
        let b = unit(3);
        assert!(matches!(b.eval(&ModeIndex(vec![3, 0]), &[0.1, 0.1]), Err(Error::UnknownMode(_))));
        assert!(b.eval(&ModeIndex(vec![1]), &[0.1, 0.1]).is_err());
    }

    #[test]
    fn invalid_construction() {
        assert!(BasisSet::new(SearchSpace::<f64>::unit_square(), 0).is_err());
        assert!(SearchSpace::new(vec![1.0, -1.0]).is_err());
        assert!(SearchSpace::new(vec![1.0]).is_err());
    }

    #[test]
    fn bulk_matches_single_evaluation() {
        for dims in [2usize, 3] {
            let space = SearchSpace::new(vec![1.3, 0.7, 2.0][..dims].to_vec()).unwrap();
            let b = BasisSet::new(space, 6).unwrap();
            let x = [0.41, 0.33, 1.7];
            let x = &x[..dims];
            let mut ws = BasisWorkspace::new(&b);
            let mut v = vec![0.0; b.len()];
            let mut g = vec![0.0; b.len() * dims];
            b.eval_all_with_grad_into(&mut ws, x, &mut v, &mut g);
            let mut v2 = vec![0.0; b.len()];
            b.eval_all_into(&mut ws, x, &mut v2);
            for (m, k) in b.indices().iter().enumerate() {
                assert_relative_eq!(v[m], b.eval(k, x).unwrap(), epsilon = 1e-12);
                assert_eq!(v[m], v2[m]);
                let gk = b.eval_grad(k, x).unwrap();
                for i in 0..dims {
                    assert_relative_eq!(g[m * dims + i], gk[i], epsilon = 1e-11);
                }
            }
        }
    }

    #[test]
    fn clamping_outside_box() {
        let b = unit(3);
        let k = ModeIndex(vec![1, 1]);
        assert_eq!(b.eval(&k, &[-0.2, 1.4]).unwrap(), b.eval(&k, &[0.0, 1.0]).unwrap());
        assert_eq!(b.eval_grad(&k, &[-0.2, 0.3]).unwrap()[0], 0.0);
    }
}
