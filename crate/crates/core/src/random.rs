//! Seeded random matrices and states for tests and property suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{complete_basis, norm, CMatrix};
use crate::scalar::{c, Real, C};

pub type SuiteRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<T: Real>(rng: &mut (impl Rng + ?Sized)) -> C<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(T::lit(re), T::lit(im))
}

/// Complex Ginibre matrix with standard normal entries.
pub fn random_matrix<T: Real>(rng: &mut (impl Rng + ?Sized), rows: usize, cols: usize) -> CMatrix<T> {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_hermitian<T: Real>(rng: &mut (impl Rng + ?Sized), dim: usize) -> CMatrix<T> {
    random_matrix(rng, dim, dim).hermitian_part()
}

/// Unit vector drawn uniformly from the sphere.
pub fn random_pure<T: Real>(rng: &mut (impl Rng + ?Sized), dim: usize) -> Vec<C<T>> {
    loop {
        let v: Vec<C<T>> = (0..dim).map(|_| gaussian(rng)).collect();
        let n = norm(&v);
        if n > T::lit(1e-6) {
            let inv = T::one() / n;
            return v.into_iter().map(|z| z * inv).collect();
        }
    }
}

/// Random density matrix of the given rank: `G G† / tr(G G†)` with `G` a `dim × rank` Ginibre matrix.
pub fn random_density<T: Real>(rng: &mut (impl Rng + ?Sized), dim: usize, rank: usize) -> CMatrix<T> {
    let g = random_matrix::<T>(rng, dim, rank.max(1));
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    m.scale_real(T::one() / tr).hermitian_part()
}

/// Haar-distributed unitary: Gram–Schmidt on Ginibre columns.
pub fn haar_unitary<T: Real>(rng: &mut (impl Rng + ?Sized), dim: usize) -> CMatrix<T> {
    let mut cols: Vec<Vec<C<T>>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C<T>> = (0..dim).map(|_| gaussian(rng)).collect();
        let residual = crate::linalg::orthonormalize_against(&mut v, &cols);
        if residual > T::lit(1e-6) {
            cols.push(v);
        }
    }
    complete_basis(cols, dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_is_unitary() {
        let mut rng = rng_from_seed(9);
        let u = haar_unitary::<f64>(&mut rng, 4);
        assert!(u.isometry_defect() < 1e-12);
    }

    #[test]
    fn same_seed_same_draws() {
        let a = random_pure::<f64>(&mut rng_from_seed(1), 3);
        let b = random_pure::<f64>(&mut rng_from_seed(1), 3);
        assert_eq!(a, b);
    }
}
