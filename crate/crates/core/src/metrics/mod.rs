//! Distances and closeness measures between states.

mod cq;
mod uniform;

pub use cq::{cq_mixture_distance, CQState};
pub use uniform::{dist_from_uniform, hiding_implies_close, UniformDistanceResult};

use thiserror::Error;

use crate::linalg::{eig_hermitian_part, nuclear_norm, CMatrix, DensityOperator, LinalgError};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("states live on different register spaces")]
    SpaceMismatch,
    #[error("classical alphabets differ")]
    AlphabetMismatch,
    #[error("invalid classical-quantum state: {0}")]
    InvalidCq(String),
    #[error("state is not normalized (total weight {0})")]
    NotNormalized(f64),
    #[error("expected a binary alphabet with uniform weights")]
    NotBinaryUniform,
}

fn same_space<T: Real>(a: &DensityOperator<T>, b: &DensityOperator<T>) -> Result<(), MetricsError> {
    if a.space() != b.space() {
        Err(MetricsError::SpaceMismatch)
    } else {
        Ok(())
    }
}

/// `‖M‖₁` for a Hermitian matrix.
pub fn hermitian_trace_norm<T: Real>(m: &CMatrix<T>) -> T {
    eig_hermitian_part(m).values.iter().map(|l| l.abs()).sum()
}

/// `½‖ρ − τ‖₁`
pub fn trace_distance<T: Real>(rho: &DensityOperator<T>, tau: &DensityOperator<T>) -> Result<T, MetricsError> {
    same_space(rho, tau)?;
    Ok(trace_distance_matrices(rho.matrix(), tau.matrix()))
}

pub(crate) fn trace_distance_matrices<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    hermitian_trace_norm(&(a - b)) * T::lit(0.5)
}

/// Square root of a positive semi-definite matrix. Eigenvalues below a small
/// multiple of machine precision (relative to the largest) are set to zero.
pub fn sqrt_psd<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let eig = eig_hermitian_part(m);
    let floor = T::lit(64.0) * T::epsilon() * eig.max().abs().max(T::min_positive_value());
    eig.map_spectrum(|l| if l > floor { l.sqrt() } else { T::zero() })
}

/// `‖√ρ √τ‖₁`
pub fn fidelity<T: Real>(rho: &DensityOperator<T>, tau: &DensityOperator<T>) -> Result<T, MetricsError> {
    same_space(rho, tau)?;
    Ok(fidelity_matrices(rho.matrix(), tau.matrix()))
}

pub(crate) fn fidelity_matrices<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    let f = nuclear_norm(&sqrt_psd(a).matmul(&sqrt_psd(b)));
    f.min(T::one()).max(T::zero())
}

/// `F(ρ,τ) + √((1 − tr ρ)(1 − tr τ))`
pub fn generalized_fidelity<T: Real>(rho: &DensityOperator<T>, tau: &DensityOperator<T>) -> Result<T, MetricsError> {
    let f = fidelity(rho, tau)?;
    let slack = ((T::one() - rho.trace()).max(T::zero()) * (T::one() - tau.trace()).max(T::zero())).sqrt();
    Ok((f + slack).min(T::one()))
}

/// `√(1 − F̄²)` with the generalized fidelity.
pub fn purified_distance<T: Real>(rho: &DensityOperator<T>, tau: &DensityOperator<T>) -> Result<T, MetricsError> {
    let f = generalized_fidelity(rho, tau)?;
    Ok((T::one() - f * f).max(T::zero()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{PureState, RegisterSpace};
    use crate::scalar::cr;

    fn qubit() -> RegisterSpace {
        RegisterSpace::single("b", 2).unwrap()
    }

    fn ket(amps: [f64; 2]) -> DensityOperator<f64> {
        PureState::new(qubit(), vec![cr(amps[0]), cr(amps[1])]).unwrap().density().unwrap()
    }

    #[test]
    fn trace_distance_examples() {
        let s = 1.0 / 2f64.sqrt();
        let zero = ket([1.0, 0.0]);
        let one = ket([0.0, 1.0]);
        let plus = ket([s, s]);
        assert_eq!(trace_distance(&zero, &zero).unwrap(), 0.0);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-15);
        assert!((trace_distance(&zero, &plus).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8);
    }

    #[test]
    fn fidelity_examples() {
        let s = 1.0 / 2f64.sqrt();
        let zero = ket([1.0, 0.0]);
        let one = ket([0.0, 1.0]);
        let plus = ket([s, s]);
        assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-14);
        assert!(fidelity(&zero, &one).unwrap().abs() < 1e-14);
        assert!((fidelity(&zero, &plus).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8);
        assert!((purified_distance(&zero, &plus).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8);
        assert!((purified_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-14);
        assert!(purified_distance(&zero, &zero).unwrap() < 1e-7);
    }

    #[test]
    fn space_mismatch_is_an_error() {
        let a = ket([1.0, 0.0]);
        let b = DensityOperator::basis(RegisterSpace::single("c", 2).unwrap(), 0).unwrap();
        assert_eq!(trace_distance(&a, &b), Err(MetricsError::SpaceMismatch));
    }

    #[test]
    fn subnormalized_generalized_fidelity() {
        let a = DensityOperator::<f64>::classical(qubit(), &[0.5, 0.0]).unwrap();
        let b = DensityOperator::<f64>::classical(qubit(), &[0.0, 0.5]).unwrap();
        // F = 0, slack term √(½·½) = ½
        assert!((generalized_fidelity(&a, &b).unwrap() - 0.5).abs() < 1e-15);
    }
}
