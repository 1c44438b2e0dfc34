//! Conditional min-entropy, its smoothed lower bounds, and chain-rule checks.

mod chain;
mod sdp;
mod smooth;

pub use chain::{
    check_classical_chain_rule, check_measurement_bound, check_quantum_chain_rule, dephase, ChainLemma, ChainReport,
};
pub use smooth::{smooth_min_entropy, SmoothMode, SmoothPolicy, SmoothResult};

use thiserror::Error;

use crate::linalg::{eig_hermitian_part, CMatrix, DensityOperator, LinalgError, RegisterSpace};
use crate::metrics::{hermitian_trace_norm, CQState, MetricsError};
use crate::policy::policy;
use crate::scalar::Real;
use sdp::{solve, Constraint};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntropyError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("state has zero trace")]
    ZeroTrace,
    #[error(
        "min-entropy solver stopped after {iterations} Newton steps with entropy in [{lambda_lower}, {lambda_upper}]"
    )]
    NonConvergence { lambda_lower: f64, lambda_upper: f64, iterations: usize },
    #[error("register `{label}` is not classical (off-diagonal mass {defect:.3e})")]
    NonClassical { label: String, defect: f64 },
    #[error("measurement basis is not orthonormal (defect {defect:.3e})")]
    BadBasis { defect: f64 },
    #[error("invalid smoothing policy: {0}")]
    InvalidPolicy(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinEntropyResult<T: Real> {
    /// Entropy in bits. Derived from a strictly feasible witness, so it never exceeds the true value.
    pub lambda: T,
    /// Entropy implied by the dual certificate; the true value lies in `[lambda, lambda_upper]`.
    pub lambda_upper: T,
    /// Normalized witness: `2^{−lambda} 1_A ⊗ optimal_sigma ⪰ ρ_AB`.
    pub optimal_sigma: DensityOperator<T>,
    /// Gap between the primal and dual traces.
    pub feasibility_gap: T,
    pub iterations: usize,
}

fn finish<T: Real>(
    b_space: RegisterSpace,
    sigma: CMatrix<T>,
    upper: T,
    lower: T,
    iterations: usize,
) -> Result<MinEntropyResult<T>, EntropyError> {
    let pol = policy::<T>();
    let lambda = -upper.log2();
    let lambda_upper = if lower > T::zero() { -lower.log2() } else { T::infinity() };
    let gap = upper - lower;
    if gap > T::lit(pol.sdp_accept) * upper.max(T::one()) {
        return Err(EntropyError::NonConvergence {
            lambda_lower: lambda.to_f64_lossy(),
            lambda_upper: lambda_upper.to_f64_lossy(),
            iterations,
        });
    }
    let tr = sigma.trace().re;
    let optimal_sigma = DensityOperator::from_trusted(b_space, sigma.scale_real(T::one() / tr));
    Ok(MinEntropyResult { lambda, lambda_upper, optimal_sigma, feasibility_gap: gap, iterations })
}

/// `H_min(A|B)` where B is `condition_on` and A is every other register.
///
/// Solves `min tr σ` subject to `1_A ⊗ σ ⪰ ρ_AB`; the entropy is `−log₂` of the optimum.
pub fn min_entropy<T: Real, S: AsRef<str>>(
    rho: &DensityOperator<T>,
    condition_on: &[S],
) -> Result<MinEntropyResult<T>, EntropyError> {
    let scale = rho.trace();
    if !(scale > T::zero()) {
        return Err(EntropyError::ZeroTrace);
    }
    let b_space = rho.space().select(condition_on)?;
    let a_space = rho.space().without(condition_on)?;
    let mut order: Vec<String> = a_space.labels().to_vec();
    order.extend(b_space.labels().iter().cloned());
    let permuted = rho.permute(&order)?;
    let m = permuted.matrix().scale_real(T::one() / scale);
    let (da, db) = (a_space.total_dim(), b_space.total_dim());

    let (sigma, upper, lower, iterations) = if db == 1 {
        let top = eig_hermitian_part(&m).max();
        (CMatrix::identity(1).scale_real(top), top, top, 0)
    } else if da == 1 {
        let tr = m.trace().re;
        (m, tr, tr, 0)
    } else {
        let sol = solve(&[Constraint { rho: m, da }], db);
        (sol.sigma, sol.upper, sol.lower, sol.iterations)
    };
    finish(b_space, sigma.scale_real(scale), upper * scale, lower * scale, iterations)
}

/// `H_min(X|B)` for a CQ state, using one constraint `σ ⪰ P(x) ρ_B^x` per symbol.
pub fn min_entropy_cq<T: Real>(rho: &CQState<T>) -> Result<MinEntropyResult<T>, EntropyError> {
    let scale = rho.total_weight();
    if !(scale > T::zero()) {
        return Err(EntropyError::ZeroTrace);
    }
    let b_space = rho.quantum_space().clone();
    let db = b_space.total_dim();
    let blocks: Vec<CMatrix<T>> = rho
        .symbols()
        .iter()
        .zip(rho.weights())
        .filter(|(_, w)| **w > T::zero())
        .map(|(&x, _)| rho.weighted_conditional(x).scale_real(T::one() / scale))
        .collect();

    let (sigma, upper, lower, iterations) = if db == 1 {
        let top = blocks.iter().map(|b| b[(0, 0)].re).fold(T::zero(), T::max);
        (CMatrix::identity(1).scale_real(top), top, top, 0)
    } else if blocks.len() == 1 {
        let m = blocks[0].clone();
        let tr = m.trace().re;
        (m, tr, tr, 0)
    } else {
        let cons: Vec<Constraint<T>> = blocks.into_iter().map(|b| Constraint { rho: b, da: 1 }).collect();
        let sol = solve(&cons, db);
        (sol.sigma, sol.upper, sol.lower, sol.iterations)
    };
    finish(b_space, sigma.scale_real(scale), upper * scale, lower * scale, iterations)
}

/// Optimal probability of guessing X from B, `2^{−H_min(X|B)}`.
pub fn guessing_probability<T: Real>(rho: &CQState<T>) -> Result<T, EntropyError> {
    rho.require_normalized()?;
    let r = min_entropy_cq(rho)?;
    Ok(T::lit(2.0).powf(-r.lambda).min(T::one()))
}

/// Closed-form optimal guessing probability for a binary alphabet:
/// `½ + ½‖P(0)ρ⁰ − P(1)ρ¹‖₁`.
pub fn helstrom_guessing_probability<T: Real>(rho: &CQState<T>) -> Result<T, EntropyError> {
    if rho.ell() != 1 {
        return Err(MetricsError::NotBinaryUniform.into());
    }
    rho.require_normalized()?;
    let diff = &rho.weighted_conditional(0) - &rho.weighted_conditional(1);
    Ok(T::lit(0.5) + T::lit(0.5) * hermitian_trace_norm(&diff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::PureState;
    use crate::scalar::{cr, czero};

    fn maximally_entangled(d: usize) -> DensityOperator<f64> {
        let space = RegisterSpace::new(&[("a", d), ("b", d)]).unwrap();
        let mut amps = vec![czero(); d * d];
        for i in 0..d {
            amps[i * d + i] = cr(1.0 / (d as f64).sqrt());
        }
        PureState::new(space, amps).unwrap().density().unwrap()
    }

    #[test]
    fn uniform_two_bits_trivial_b() {
        let rho = DensityOperator::<f64>::maximally_mixed(RegisterSpace::new(&[("x0", 2), ("x1", 2)]).unwrap()).unwrap();
        let r = min_entropy(&rho, &[] as &[&str]).unwrap();
        assert_eq!(r.lambda, 2.0);
    }

    #[test]
    fn pure_a_trivial_b() {
        let rho = DensityOperator::<f64>::basis(RegisterSpace::single("a", 3).unwrap(), 1).unwrap();
        assert_eq!(min_entropy(&rho, &[] as &[&str]).unwrap().lambda, 0.0);
    }

    #[test]
    fn maximally_entangled_is_minus_log_d() {
        for d in 2..=4 {
            let r = min_entropy(&maximally_entangled(d), &["b"]).unwrap();
            assert!((r.lambda + (d as f64).log2()).abs() < 1e-6, "d={d}: {}", r.lambda);
            assert!(r.feasibility_gap <= 1e-8);
        }
    }

    #[test]
    fn witness_satisfies_operator_inequality() {
        let rho = maximally_entangled(2);
        let r = min_entropy(&rho, &["b"]).unwrap();
        let scaled = r.optimal_sigma.matrix().scale_real(2f64.powf(-r.lambda));
        let lhs = CMatrix::identity(2).kron(&scaled);
        let slack = eig_hermitian_part(&(&lhs - rho.matrix())).min();
        assert!(slack >= -1e-8);
    }

    #[test]
    fn helstrom_examples() {
        let b = RegisterSpace::single("b", 2).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let zero = DensityOperator::<f64>::basis(b.clone(), 0).unwrap();
        let one = DensityOperator::basis(b.clone(), 1).unwrap();
        let plus = PureState::new(b, vec![cr(s), cr(s)]).unwrap().density().unwrap();

        let orth = CQState::uniform(1, vec![zero.clone(), one]).unwrap();
        assert!((guessing_probability(&orth).unwrap() - 1.0).abs() < 1e-8);
        let same = CQState::uniform(1, vec![zero.clone(), zero.clone()]).unwrap();
        assert!((guessing_probability(&same).unwrap() - 0.5).abs() < 1e-8);
        let zp = CQState::uniform(1, vec![zero, plus]).unwrap();
        let closed = helstrom_guessing_probability(&zp).unwrap();
        assert!((closed - 0.85355339).abs() < 1e-8);
        assert!((guessing_probability(&zp).unwrap() - closed).abs() < 1e-6);
    }

    #[test]
    fn subnormalized_input_shifts_by_log_trace() {
        let rho = DensityOperator::<f64>::classical(RegisterSpace::single("a", 2).unwrap(), &[0.25, 0.25]).unwrap();
        // λ_max = 1/4
        assert!((min_entropy(&rho, &[] as &[&str]).unwrap().lambda - 2.0).abs() < 1e-12);
    }
}
