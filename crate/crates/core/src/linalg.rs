//! Small dense helpers that need only `Float` arithmetic.
//!
//! nalgebra's factorizations require `ComplexField`, which would clash with
//! `num_traits::Float` method resolution in generic code, so the handful of
//! decompositions used here are written directly.

use nalgebra::DMatrix;

use crate::scalar::Scalar;

/// Lower Cholesky factor of a symmetric matrix, or `None` if it is not
/// (numerically) positive definite.
pub fn cholesky<T: Scalar>(a: &DMatrix<T>) -> Option<DMatrix<T>> {
    let n = a.nrows();
    debug_assert_eq!(n, a.ncols());
    let mut l = DMatrix::<T>::zeros(n, n);
    for j in 0..n {
        let mut diag = a[(j, j)];
        for k in 0..j {
            diag -= l[(j, k)] * l[(j, k)];
        }
        if !(diag > T::zero()) || !diag.is_finite() {
            return None;
        }
        let ljj = diag.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..n {
            let mut v = a[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / ljj;
        }
    }
    Some(l)
}

/// Solves `L Lᵀ X = B` given the lower Cholesky factor `L`.
pub fn cholesky_solve<T: Scalar>(l: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    let n = l.nrows();
    let mut x = b.clone();
    for c in 0..b.ncols() {
        for i in 0..n {
            let mut v = x[(i, c)];
            for k in 0..i {
                v -= l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = v / l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut v = x[(i, c)];
            for k in (i + 1)..n {
                v -= l[(k, i)] * x[(k, c)];
            }
            x[(i, c)] = v / l[(i, i)];
        }
    }
    x
}

/// Inverse and determinant of an SPD matrix via Cholesky.
pub fn spd_inverse_det<T: Scalar>(a: &DMatrix<T>) -> Option<(DMatrix<T>, T)> {
    let l = cholesky(a)?;
    let n = a.nrows();
    let det = (0..n).fold(T::one(), |acc, i| acc * l[(i, i)] * l[(i, i)]);
    let inv = cholesky_solve(&l, &DMatrix::identity(n, n));
    Some((inv, det))
}

/// Largest absolute entry.
pub fn max_abs<T: Scalar>(a: &DMatrix<T>) -> T {
    a.iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

/// Symmetrizes in place: `A ← (A + Aᵀ) / 2`.
pub fn symmetrize<T: Scalar>(a: &mut DMatrix<T>) {
    let n = a.nrows();
    let half = T::lit(0.5);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = (a[(i, j)] + a[(j, i)]) * half;
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
}
