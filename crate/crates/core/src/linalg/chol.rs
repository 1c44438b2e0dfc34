//! Cholesky factorizations for positive-definite systems.

use super::CMatrix;
use crate::scalar::{cr, czero, Real};

/// Lower-triangular `L` with `A = L L†`, or `None` if `A` is not positive definite.
pub fn cholesky<T: Real>(a: &CMatrix<T>) -> Option<CMatrix<T>> {
    let n = a.rows();
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d = d - l[(j, k)].norm_sqr();
        }
        if !(d > T::zero()) {
            return None;
        }
        let ljj = d.sqrt();
        l[(j, j)] = cr(ljj);
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s = s - l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / cr(ljj);
        }
    }
    Some(l)
}

/// Inverse of a Hermitian positive-definite matrix from its Cholesky factor.
pub fn inverse_from_cholesky<T: Real>(l: &CMatrix<T>) -> CMatrix<T> {
    let n = l.rows();
    // L^{-1} by forward substitution, column by column
    let mut linv = CMatrix::zeros(n, n);
    for col in 0..n {
        for i in col..n {
            let mut s = if i == col { cr(T::one()) } else { czero() };
            for k in col..i {
                s = s - l[(i, k)] * linv[(k, col)];
            }
            linv[(i, col)] = s / l[(i, i)];
        }
    }
    let inv = linv.adjoint_mul(&linv);
    inv.hermitian_part()
}

/// Solves the real symmetric positive-definite system `H x = b` in place.
/// Returns `None` if `H` is not numerically positive definite.
pub fn solve_spd<T: Real>(h: &[T], n: usize, b: &[T]) -> Option<Vec<T>> {
    let mut l = vec![T::zero(); n * n];
    for j in 0..n {
        let mut d = h[j * n + j];
        for k in 0..j {
            d = d - l[j * n + k] * l[j * n + k];
        }
        if !(d > T::zero()) {
            return None;
        }
        let ljj = d.sqrt();
        l[j * n + j] = ljj;
        for i in (j + 1)..n {
            let mut s = h[i * n + j];
            for k in 0..j {
                s = s - l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / ljj;
        }
    }
    let mut y = vec![T::zero(); n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s = s - l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s = s - l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    Some(x)
}
