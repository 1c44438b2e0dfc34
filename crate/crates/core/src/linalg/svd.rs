//! Singular value decomposition through the Hermitian eigensolver.
//!
//! Right singular vectors come from the eigenvectors of `M†M`; each left vector is
//! `M v / ‖M v‖`, re-orthogonalized, and the left basis is completed to a unitary.
//! Taking `σ = ‖M v‖` rather than `sqrt(λ)` keeps small singular values accurate.

use super::eigen::eig_hermitian_part;
use super::matrix::{norm, orthonormalize_against, complete_basis};
use super::CMatrix;
use crate::scalar::{cr, Real, C};

#[derive(Debug, Clone)]
pub struct Svd<T: Real> {
    /// `rows × rows` unitary.
    pub u: CMatrix<T>,
    /// `min(rows, cols)` singular values, descending.
    pub singular: Vec<T>,
    /// `cols × cols` unitary.
    pub v: CMatrix<T>,
}

impl<T: Real> Svd<T> {
    pub fn reconstruct(&self) -> CMatrix<T> {
        let (r, cdim) = (self.u.rows(), self.v.rows());
        let mut sigma = CMatrix::zeros(r, cdim);
        for (k, &s) in self.singular.iter().enumerate() {
            sigma[(k, k)] = cr(s);
        }
        self.u.matmul(&sigma).matmul(&self.v.adjoint())
    }
}

/// `(σ, v, M v)` for one right singular vector.
type Triple<T> = (T, Vec<C<T>>, Vec<C<T>>);

pub fn svd<T: Real>(m: &CMatrix<T>) -> Svd<T> {
    let (rows, cols) = (m.rows(), m.cols());
    let gram = m.adjoint_mul(m);
    let eig = eig_hermitian_part(&gram);

    // (σ, v, Mv) sorted by σ descending
    let mut triples: Vec<Triple<T>> = (0..cols)
        .map(|k| {
            let v = eig.vector(k);
            let mv = m.mul_vec(&v);
            (norm(&mv), v, mv)
        })
        .collect();
    triples.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));

    let rank_cap = rows.min(cols);
    let scale = triples.first().map(|t| t.0).unwrap_or(T::zero());
    let tiny = T::min_positive_value().sqrt() * scale.max(T::one());
    let mut left: Vec<Vec<C<T>>> = Vec::with_capacity(rows);
    let mut singular = Vec::with_capacity(rank_cap);
    let mut right_cols = Vec::with_capacity(cols);
    for (k, (s, v, mut mv)) in triples.into_iter().enumerate() {
        if k < rank_cap {
            if s > tiny {
                let residual = orthonormalize_against(&mut mv, &left);
                if residual > s * T::lit(0.5) {
                    left.push(mv);
                }
            }
            singular.push(s);
        }
        right_cols.push(v);
    }
    let u = complete_basis(left, rows);
    let v = CMatrix::from_columns(&right_cols, cols);
    Svd { u, singular, v }
}

/// Sum of singular values.
pub fn nuclear_norm<T: Real>(m: &CMatrix<T>) -> T {
    let gram = m.adjoint_mul(m);
    let eig = eig_hermitian_part(&gram);
    (0..m.cols()).map(|k| norm(&m.mul_vec(&eig.vector(k)))).sum()
}
