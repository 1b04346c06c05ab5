use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{BasisSet, BasisWorkspace, SearchSpace};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, max_abs, spd_inverse_det};
use crate::metric::CoefficientVector;
use crate::scalar::{CompensatedSum, Scalar};

/// Default midpoint-quadrature resolution per dimension for target coefficients.
pub const DEFAULT_QUADRATURE_CELLS: usize = 256;

const MAX_REJECTIONS: usize = 1000;

/// Weighted sum of multivariate normals.
#[derive(Debug, Clone)]
pub struct GaussianMixture<T> {
    weights: Vec<T>,
    means: Vec<Vec<T>>,
    covariances: Vec<DMatrix<T>>,
    precisions: Vec<DMatrix<T>>,
    chol: Vec<DMatrix<T>>,
    norm_consts: Vec<T>,
}

impl<T: Scalar> GaussianMixture<T> {
    pub fn new(weights: Vec<T>, means: Vec<Vec<T>>, covariances: Vec<DMatrix<T>>) -> Result<Self> {
        if weights.is_empty() || weights.len() != means.len() || weights.len() != covariances.len() {
            return Err(Error::InvalidDistribution(
                "weights, means and covariances must be non-empty and equally long".into(),
            ));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= T::zero())) {
            return Err(Error::InvalidDistribution("weights must be non-negative".into()));
        }
        let total: T = weights.iter().copied().sum();
        if (total - T::one()).abs() > T::lit(1e-6) {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}, expected 1")));
        }
        let d = means[0].len();
        let mut precisions = Vec::with_capacity(weights.len());
        let mut chol = Vec::with_capacity(weights.len());
        let mut norm_consts = Vec::with_capacity(weights.len());
        for (j, (mu, cov)) in means.iter().zip(&covariances).enumerate() {
            if mu.len() != d || cov.nrows() != d || cov.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d, got: mu.len().max(cov.nrows()) });
            }
            if mu.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("mixture mean"));
            }
            let asym = max_abs(&(cov - cov.transpose()));
            if asym > T::lit(1e-9) * max_abs(cov).max(T::one()) {
                return Err(Error::DegenerateCovariance(j));
            }
            let l = cholesky(cov).ok_or(Error::DegenerateCovariance(j))?;
            let (inv, det) = spd_inverse_det(cov).ok_or(Error::DegenerateCovariance(j))?;
            let two_pi = T::lit(2.0) * T::PI();
            norm_consts.push(T::one() / (two_pi.powi(d as i32) * det).sqrt());
            precisions.push(inv);
            chol.push(l);
        }
        Ok(Self { weights, means, covariances, precisions, chol, norm_consts })
    }

    pub fn dims(&self) -> usize {
        self.means[0].len()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn means(&self) -> &[Vec<T>] {
        &self.means
    }

    pub fn covariances(&self) -> &[DMatrix<T>] {
        &self.covariances
    }

    /// Untruncated mixture density.
    pub fn density(&self, x: &[T]) -> T {
        let d = self.dims();
        let mut total = T::zero();
        let mut diff = vec![T::zero(); d];
        for j in 0..self.weights.len() {
            for i in 0..d {
                diff[i] = x[i] - self.means[j][i];
            }
            let p = &self.precisions[j];
            let mut q = T::zero();
            for a in 0..d {
                for b in 0..d {
                    q += diff[a] * p[(a, b)] * diff[b];
                }
            }
            total += self.weights[j] * self.norm_consts[j] * (-T::lit(0.5) * q).exp();
        }
        total
    }
}

/// Piecewise-constant density on a regular grid covering the search space.
///
/// Cell values are stored with the first axis fastest: for a 2-D grid the
/// flat index is `row * nx + col`, where the column runs along `x` and row 0
/// touches `y = 0`.
#[derive(Debug, Clone)]
pub struct GridDensity<T> {
    counts: Vec<usize>,
    values: Vec<T>,
    cell_size: Vec<T>,
}

impl<T: Scalar> GridDensity<T> {
    pub fn new(space: &SearchSpace<T>, counts: Vec<usize>, values: Vec<T>) -> Result<Self> {
        if counts.len() != space.dims() {
            return Err(Error::DimensionMismatch { expected: space.dims(), got: counts.len() });
        }
        if counts.iter().any(|&c| c == 0) {
            return Err(Error::InvalidDistribution("grid must have at least one cell per dim".into()));
        }
        let expected: usize = counts.iter().product();
        if values.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: values.len() });
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= T::zero())) {
            return Err(Error::InvalidDistribution("grid values must be finite and non-negative".into()));
        }
        let cell_size: Vec<T> =
            space.lengths().iter().zip(&counts).map(|(&l, &c)| l / T::from_usize_lossy(c)).collect();
        let cell_volume = cell_size.iter().fold(T::one(), |a, &c| a * c);
        let mass: T = values.iter().copied().sum::<T>() * cell_volume;
        if !(mass > T::zero()) {
            return Err(Error::InvalidDistribution("grid has zero mass".into()));
        }
        let values = values.into_iter().map(|v| v / mass).collect();
        Ok(Self { counts, values, cell_size })
    }

    /// Constant density over the whole space.
    pub fn uniform(space: &SearchSpace<T>) -> Self {
        Self::new(space, vec![1; space.dims()], vec![T::one()]).expect("uniform grid is valid")
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn cell_size(&self) -> &[T] {
        &self.cell_size
    }

    pub fn cell_volume(&self) -> T {
        self.cell_size.iter().fold(T::one(), |a, &c| a * c)
    }

    /// Centers of all cells with positive density.
    pub fn occupied_centers(&self) -> Vec<Vec<T>> {
        let d = self.counts.len();
        let half = T::lit(0.5);
        let mut out = Vec::new();
        for (flat, v) in self.values.iter().enumerate() {
            if *v > T::zero() {
                let mut rem = flat;
                let mut c = vec![T::zero(); d];
                for i in 0..d {
                    let idx = rem % self.counts[i];
                    rem /= self.counts[i];
                    c[i] = (T::from_usize_lossy(idx) + half) * self.cell_size[i];
                }
                out.push(c);
            }
        }
        out
    }

    pub fn density(&self, x: &[T]) -> T {
        let mut flat = 0;
        let mut stride = 1;
        for i in 0..self.counts.len() {
            let raw = (x[i] / self.cell_size[i]).floor();
            let idx = if raw < T::zero() {
                0
            } else {
                raw.to_usize().unwrap_or(usize::MAX).min(self.counts[i] - 1)
            };
            flat += idx * stride;
            stride *= self.counts[i];
        }
        self.values[flat]
    }
}

/// Spatial distribution the coverage should match.
#[derive(Debug, Clone)]
pub enum TargetDistribution<T> {
    GaussianMixture(GaussianMixture<T>),
    Grid(GridDensity<T>),
}

impl<T: Scalar> TargetDistribution<T> {
    /// Density before truncation to the search space.
    pub fn density(&self, x: &[T]) -> T {
        match self {
            Self::GaussianMixture(g) => g.density(x),
            Self::Grid(g) => g.density(x),
        }
    }
}

/// Fourier coefficients `φ_k` of `q` by midpoint quadrature, renormalized by
/// the quadrature mass over the search space.
pub fn target_coefficients<T: Scalar>(
    basis: &BasisSet<T>,
    q: &TargetDistribution<T>,
    cells_per_dim: usize,
) -> Result<CoefficientVector<T>> {
    let required = 2 * basis.modes_per_dim();
    if cells_per_dim < required {
        return Err(Error::UnderResolvedQuadrature { cells: cells_per_dim, required });
    }
    let space = basis.space();
    let d = space.dims();
    let cell: Vec<T> = space.lengths().iter().map(|&l| l / T::from_usize_lossy(cells_per_dim)).collect();
    let cell_volume = cell.iter().fold(T::one(), |a, &c| a * c);
    let half = T::lit(0.5);

    let mut ws = BasisWorkspace::new(basis);
    let mut fk = vec![T::zero(); basis.len()];
    let mut acc: Vec<CompensatedSum<T>> = vec![CompensatedSum::new(); basis.len()];
    let mut mass = CompensatedSum::new();
    let mut x = vec![T::zero(); d];
    let total = cells_per_dim.pow(d as u32);
    for flat in 0..total {
        let mut rem = flat;
        for i in 0..d {
            x[i] = (T::from_usize_lossy(rem % cells_per_dim) + half) * cell[i];
            rem /= cells_per_dim;
        }
        let qx = q.density(&x);
        if qx == T::zero() {
            continue;
        }
        mass.add(qx * cell_volume);
        basis.eval_all_into(&mut ws, &x, &mut fk);
        for (a, &f) in acc.iter_mut().zip(&fk) {
            a.add(qx * f);
        }
    }
    let mass = mass.value();
    if !(mass > T::zero()) || !mass.is_finite() {
        return Err(Error::InvalidDistribution("target has no mass inside the search space".into()));
    }
    Ok(CoefficientVector::new(acc.iter().map(|a| a.value() * cell_volume / mass).collect()))
}

/// Truncated reconstruction `Σ_k φ_k f_k(x)`.
pub fn reconstruct<T: Scalar>(basis: &BasisSet<T>, coeffs: &CoefficientVector<T>, x: &[T]) -> T {
    basis.eval_all(x).iter().zip(coeffs.values()).map(|(&f, &c)| f * c).sum()
}

/// Draws `n` points from the mixture, resampling any draw outside `space`.
pub fn sample_gmm<T: Scalar, R: Rng + ?Sized>(
    q: &GaussianMixture<T>,
    space: &SearchSpace<T>,
    n: usize,
    rng: &mut R,
) -> Result<Vec<Vec<T>>> {
    if n == 0 {
        return Err(Error::InvalidDistribution("sample count must be at least 1".into()));
    }
    if q.dims() != space.dims() {
        return Err(Error::DimensionMismatch { expected: space.dims(), got: q.dims() });
    }
    let d = q.dims();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut accepted = None;
        for _ in 0..MAX_REJECTIONS {
            let u: f64 = rng.random();
            let mut j = q.weights.len() - 1;
            let mut cum = 0.0;
            for (i, w) in q.weights.iter().enumerate() {
                cum += w.to_f64_lossy();
                if u < cum {
                    j = i;
                    break;
                }
            }
            let z: Vec<T> = (0..d).map(|_| T::lit(rng.sample::<f64, _>(StandardNormal))).collect();
            let l = &q.chol[j];
            let x: Vec<T> = (0..d)
                .map(|a| q.means[j][a] + (0..=a).fold(T::zero(), |acc, b| acc + l[(a, b)] * z[b]))
                .collect();
            if space.contains(&x) {
                accepted = Some(x);
                break;
            }
        }
        out.push(accepted.ok_or(Error::RejectionBudgetExhausted(MAX_REJECTIONS))?);
    }
    Ok(out)
}
