//! Distance of a CQ state from one whose classical part is uniform and independent.

use super::{hermitian_trace_norm, trace_distance_matrices, CQState, MetricsError};
use crate::linalg::{eig_hermitian_part, CMatrix, DensityOperator};
use crate::policy::policy;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct UniformDistanceResult<T: Real> {
    pub value: T,
    /// Minimizing `σ_B`.
    pub optimal_sigma: DensityOperator<T>,
    pub iterations: usize,
}

/// `½ Σ_x ‖P(x) ρ_B^x − σ/|X|‖₁`, the trace distance of `ρ_XB` to `1/|X| ⊗ σ_B`.
fn objective<T: Real>(blocks: &[CMatrix<T>], sigma: &CMatrix<T>) -> T {
    let s = sigma.scale_real(T::one() / T::from_usize_lossy(blocks.len()));
    blocks.iter().map(|a| hermitian_trace_norm(&(a - &s))).sum::<T>() * T::lit(0.5)
}

fn subgradient<T: Real>(blocks: &[CMatrix<T>], sigma: &CMatrix<T>) -> CMatrix<T> {
    let n = T::from_usize_lossy(blocks.len());
    let s = sigma.scale_real(T::one() / n);
    let d = sigma.rows();
    let mut g = CMatrix::zeros(d, d);
    for a in blocks {
        let sign = eig_hermitian_part(&(a - &s)).map_spectrum(|l| {
            if l > T::zero() {
                T::one()
            } else if l < T::zero() {
                -T::one()
            } else {
                T::zero()
            }
        });
        g = &g + &sign;
    }
    g.scale_real(-T::lit(0.5) / n)
}

/// Euclidean projection onto unit-trace positive semi-definite matrices.
fn project_to_states<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let eig = eig_hermitian_part(m);
    let v = &eig.values; // descending
    let mut cum = T::zero();
    let mut theta = T::zero();
    for (k, &vk) in v.iter().enumerate() {
        cum = cum + vk;
        let t = (cum - T::one()) / T::from_usize_lossy(k + 1);
        if vk - t > T::zero() {
            theta = t;
        }
    }
    eig.map_spectrum(|l| (l - theta).max(T::zero()))
}

/// Minimizes the distance over `σ_B` by projected subgradient descent, warm-started
/// from the best of the normalized marginal and the normalized conditionals.
pub fn dist_from_uniform<T: Real>(rho: &CQState<T>) -> Result<UniformDistanceResult<T>, MetricsError> {
    rho.require_normalized()?;
    let pol = policy::<T>();
    let n = rho.alphabet_size();
    let blocks: Vec<CMatrix<T>> = (0..n).map(|x| rho.weighted_conditional(x)).collect();
    let d = rho.quantum_space().total_dim();

    let mut candidates = vec![rho.marginal_b()];
    candidates.extend(rho.conditionals().iter().map(|c| c.matrix().clone()));
    let mut best_sigma = CMatrix::identity(d).scale_real(T::one() / T::from_usize_lossy(d));
    let mut best = objective(&blocks, &best_sigma);
    for c in candidates {
        let tr = c.trace().re;
        if tr > T::zero() {
            let s = c.scale_real(T::one() / tr).hermitian_part();
            let v = objective(&blocks, &s);
            if v < best {
                best = v;
                best_sigma = s;
            }
        }
    }

    let tol = T::lit(pol.validity);
    let mut iterations = 0;
    if best > tol && d > 1 {
        let improvement = T::lit(pol.uniform_improvement);
        let window = 100;
        let mut sigma = best_sigma.clone();
        let mut last_mark = best;
        let step0 = T::lit(0.5);
        for k in 0..pol.uniform_max_iters {
            iterations = k + 1;
            let g = subgradient(&blocks, &sigma);
            let gn = g.frobenius_norm();
            if gn == T::zero() {
                break;
            }
            let step = step0 / T::from_usize_lossy(k + 1).sqrt();
            sigma = project_to_states(&(&sigma - &g.scale_real(step / gn)));
            let v = objective(&blocks, &sigma);
            if v < best {
                best = v;
                best_sigma = sigma.clone();
            }
            if (k + 1) % window == 0 {
                if last_mark - best < improvement {
                    break;
                }
                last_mark = best;
            }
        }
    }

    let value = if best <= tol { T::zero() } else { best.min(T::one()) };
    let optimal_sigma = DensityOperator::new(rho.quantum_space().clone(), best_sigma)?;
    Ok(UniformDistanceResult { value, optimal_sigma, iterations })
}

/// For a uniform binary CQ state, returns `(d_unif, D(ρ_B⁰, ρ_B¹))`; the second never
/// exceeds twice the first.
pub fn hiding_implies_close<T: Real>(rho: &CQState<T>) -> Result<(T, T), MetricsError> {
    if rho.ell() != 1 || !rho.is_uniform() {
        return Err(MetricsError::NotBinaryUniform);
    }
    let d_unif = dist_from_uniform(rho)?.value;
    let i0 = rho.position(0).ok_or(MetricsError::NotBinaryUniform)?;
    let i1 = rho.position(1).ok_or(MetricsError::NotBinaryUniform)?;
    let dist = trace_distance_matrices(rho.conditionals()[i0].matrix(), rho.conditionals()[i1].matrix());
    Ok((d_unif, dist))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RegisterSpace;
    use crate::random::{random_density, rng_from_seed};

    fn qubit() -> RegisterSpace {
        RegisterSpace::single("b", 2).unwrap()
    }

    #[test]
    fn independent_uniform_is_zero() {
        let mut rng = rng_from_seed(1);
        let r = DensityOperator::new(qubit(), random_density::<f64>(&mut rng, 2, 2)).unwrap();
        let cq = CQState::uniform(2, vec![r.clone(), r.clone(), r.clone(), r]).unwrap();
        assert_eq!(dist_from_uniform(&cq).unwrap().value, 0.0);
    }

    #[test]
    fn deterministic_bit_with_trivial_b() {
        let one = DensityOperator::<f64>::new(RegisterSpace::empty(), CMatrix::identity(1)).unwrap();
        let cq = CQState::new(1, vec![0], vec![1.0], vec![one]).unwrap();
        assert!((dist_from_uniform(&cq).unwrap().value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn copied_bit_is_one_half() {
        let c0 = DensityOperator::<f64>::basis(qubit(), 0).unwrap();
        let c1 = DensityOperator::basis(qubit(), 1).unwrap();
        let cq = CQState::uniform(1, vec![c0, c1]).unwrap();
        let r = dist_from_uniform(&cq).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
        assert_eq!(hiding_implies_close(&cq).unwrap(), (r.value, 1.0));
    }

    #[test]
    fn reported_sigma_reproduces_value() {
        let mut rng = rng_from_seed(4);
        let conds: Vec<_> = (0..4)
            .map(|_| DensityOperator::new(qubit(), random_density::<f64>(&mut rng, 2, 2)).unwrap())
            .collect();
        let cq = CQState::new(2, vec![0, 1, 2, 3], vec![0.1, 0.2, 0.3, 0.4], conds).unwrap();
        let r = dist_from_uniform(&cq).unwrap();
        let blocks: Vec<_> = (0..4).map(|x| cq.weighted_conditional(x)).collect();
        assert!((objective(&blocks, r.optimal_sigma.matrix()) - r.value).abs() <= 1e-7);
        assert!(r.value > 0.0 && r.value <= 1.0);
    }

    #[test]
    fn rejects_subnormalized() {
        let c0 = DensityOperator::<f64>::basis(qubit(), 0).unwrap();
        let cq = CQState::new(1, vec![0], vec![0.5], vec![c0]).unwrap();
        assert!(matches!(dist_from_uniform(&cq), Err(MetricsError::NotNormalized(_))));
    }

    #[test]
    fn projection_lands_on_states() {
        let m = CMatrix::from_real_diag(&[2.0f64, -1.0, 0.5]);
        let p = project_to_states(&m);
        assert!((p.trace().re - 1.0).abs() < 1e-14);
        assert!(eig_hermitian_part(&p).min() >= -1e-15);
    }
}
