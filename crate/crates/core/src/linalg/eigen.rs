//! Cyclic Jacobi diagonalization of Hermitian matrices.

use super::{CMatrix, LinalgError};
use crate::policy::policy;
use crate::scalar::{c, cr, Real, C};

/// Spectral decomposition `A = V diag(values) V†`, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Real> {
    pub values: Vec<T>,
    /// Eigenvectors as columns, ordered like `values`.
    pub vectors: CMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    /// `V f(Λ) V†`
    pub fn map_spectrum(&self, f: impl Fn(T) -> T) -> CMatrix<T> {
        let n = self.values.len();
        let fv: Vec<T> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        CMatrix::from_fn(n, n, |i, j| {
            let mut acc = C::new(T::zero(), T::zero());
            for k in 0..n {
                if fv[k] != T::zero() {
                    acc = acc + v[(i, k)] * v[(j, k)].conj() * fv[k];
                }
            }
            acc
        })
    }

    pub fn reconstruct(&self) -> CMatrix<T> {
        self.map_spectrum(|l| l)
    }

    pub fn min(&self) -> T {
        *self.values.last().expect("nonempty spectrum")
    }

    pub fn max(&self) -> T {
        self.values[0]
    }

    pub fn vector(&self, k: usize) -> Vec<C<T>> {
        self.vectors.column(k)
    }
}

/// Diagonalizes a Hermitian matrix. Fails if the input deviates from Hermiticity by
/// more than the validity tolerance (relative to its largest entry, floored at 1).
pub fn eig_hermitian<T: Real>(m: &CMatrix<T>) -> Result<HermitianEigen<T>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::Shape { expected: (m.rows(), m.rows()), found: (m.rows(), m.cols()) });
    }
    let tol = T::lit(policy::<T>().validity) * m.max_abs().max(T::one());
    let defect = m.hermiticity_defect();
    if defect > tol {
        return Err(LinalgError::NotHermitian { deviation: defect.to_f64_lossy() });
    }
    Ok(jacobi(&m.hermitian_part()))
}

/// Diagonalizes the Hermitian part of `m` without checking.
pub(crate) fn eig_hermitian_part<T: Real>(m: &CMatrix<T>) -> HermitianEigen<T> {
    jacobi(&m.hermitian_part())
}

fn jacobi<T: Real>(m: &CMatrix<T>) -> HermitianEigen<T> {
    let n = m.rows();
    let mut a = m.clone();
    let mut v = CMatrix::identity(n);
    let max_sweeps = policy::<T>().jacobi_max_sweeps;
    let eps = T::epsilon();

    for _ in 0..max_sweeps {
        let mut off = T::zero();
        let mut total = T::zero();
        for i in 0..n {
            for j in 0..n {
                let s = a[(i, j)].norm_sqr();
                total = total + s;
                if i != j {
                    off = off + s;
                }
            }
        }
        if off <= eps * eps * total || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == T::zero() {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Skip rotations that cannot change the diagonal at working precision.
                let scale = app.abs() + aqq.abs();
                if scale > T::zero() && mag < eps * eps * scale {
                    a[(p, q)] = c(T::zero(), T::zero());
                    a[(q, p)] = c(T::zero(), T::zero());
                    continue;
                }
                let phase = apq / cr(mag);
                let theta = (aqq - app) / (T::lit(2.0) * mag);
                let t = {
                    let sgn = if theta >= T::zero() { T::one() } else { -T::one() };
                    sgn / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let cs = T::one() / (t * t + T::one()).sqrt();
                let sn = t * cs;
                // G = diag(1, conj(phase)) · [[c, s], [-s, c]]
                let g_pp = cr(cs);
                let g_pq = cr(sn);
                let g_qp = phase.conj() * cr(-sn);
                let g_qq = phase.conj() * cr(cs);

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * g_pp + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * g_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[(p, q)] = c(T::zero(), T::zero());
                a[(q, p)] = c(T::zero(), T::zero());
                a[(p, p)] = cr(a[(p, p)].re);
                a[(q, q)] = cr(a[(q, q)].re);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.partial_cmp(&a[(i, i)].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    HermitianEigen { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, rng_from_seed};

    #[test]
    fn identity_has_unit_spectrum() {
        let e = eig_hermitian(&CMatrix::<f64>::identity(2)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
    }

    #[test]
    fn pauli_z_spectrum() {
        let z = CMatrix::from_real_diag(&[1.0f64, -1.0]);
        let e = eig_hermitian(&z).unwrap();
        assert_eq!(e.values, vec![1.0, -1.0]);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::<f64>::zeros(2, 2);
        m[(0, 1)] = cr(1.0);
        assert!(matches!(eig_hermitian(&m), Err(LinalgError::NotHermitian { .. })));
    }

    #[test]
    fn random_8x8_reconstructs() {
        let mut rng = rng_from_seed(7);
        let h = random_hermitian::<f64>(&mut rng, 8);
        let e = eig_hermitian(&h).unwrap();
        assert!((&e.reconstruct() - &h).frobenius_norm() <= 1e-9);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        assert!(e.vectors.isometry_defect() < 1e-12);
    }

    #[test]
    fn single_precision_decomposes() {
        let mut rng = rng_from_seed(3);
        let h = random_hermitian::<f32>(&mut rng, 6);
        let e = eig_hermitian(&h).unwrap();
        assert!((&e.reconstruct() - &h).frobenius_norm() <= 1e-4);
    }
}
