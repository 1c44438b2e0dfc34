//! The three entropy inequalities used to bound what Bob learns from the resource,
//! evaluated at zero smoothing.

use serde::Serialize;

use super::{min_entropy, EntropyError};
use crate::linalg::{CMatrix, DensityOperator};
use crate::policy::policy;
use crate::scalar::{czero, log2_dim, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainLemma {
    /// `H(X|BZ) ≥ H(X|B) − log|Z|` for classical Z.
    ClassicalChain,
    /// `H(X|BC) ≥ H(X|BZ) − log|C|` with Z the outcome of measuring C.
    Measurement,
    /// `H(X|BC) ≥ H(X|B) − 2 log|C|`.
    QuantumChain,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport<T: Real + Serialize> {
    pub lemma: ChainLemma,
    pub lhs: T,
    pub rhs: T,
    /// `lhs − rhs`
    pub slack: T,
    pub holds: bool,
}

impl<T: Real + Serialize> ChainReport<T> {
    fn new(lemma: ChainLemma, lhs: T, rhs: T) -> Self {
        let slack = lhs - rhs;
        let holds = slack >= -T::lit(policy::<T>().check);
        ChainReport { lemma, lhs, rhs, slack, holds }
    }
}

fn with<S: AsRef<str>>(b: &[S], extra: &str) -> Vec<String> {
    let mut v: Vec<String> = b.iter().map(|s| s.as_ref().to_string()).collect();
    v.push(extra.to_string());
    v
}

/// Largest entry of the blocks off the diagonal of `label`.
fn off_diagonal_mass<T: Real>(rho: &DensityOperator<T>, label: &str) -> Result<T, EntropyError> {
    let sp = rho.space().split(&[label])?;
    let m = rho.matrix();
    let n = rho.dim();
    let mut worst = T::zero();
    for i in 0..n {
        for j in 0..n {
            if sp.row_of[i] != sp.row_of[j] {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    Ok(worst)
}

/// Zeroes the coherences of `label` in its computational basis.
pub fn dephase<T: Real>(rho: &DensityOperator<T>, label: &str) -> Result<DensityOperator<T>, EntropyError> {
    let sp = rho.space().split(&[label])?;
    let n = rho.dim();
    let m = rho.matrix();
    let out = CMatrix::from_fn(n, n, |i, j| if sp.row_of[i] == sp.row_of[j] { m[(i, j)] } else { czero() });
    Ok(DensityOperator::from_trusted(rho.space().clone(), out))
}

/// X is every register outside `b` and `z`.
pub fn check_classical_chain_rule<T: Real + Serialize, S: AsRef<str>>(
    rho: &DensityOperator<T>,
    b: &[S],
    z: &str,
) -> Result<ChainReport<T>, EntropyError> {
    let defect = off_diagonal_mass(rho, z)?;
    if defect > T::lit(policy::<T>().reconstruction) {
        return Err(EntropyError::NonClassical { label: z.to_string(), defect: defect.to_f64_lossy() });
    }
    let dz = rho.space().dim_of(z)?;
    let lhs = min_entropy(rho, &with(b, z))?.lambda;
    let rhs = min_entropy(&rho.partial_trace(&[z])?, b)?.lambda - log2_dim::<T>(dz);
    Ok(ChainReport::new(ChainLemma::ClassicalChain, lhs, rhs))
}

/// `basis` holds the measurement vectors of `c` as columns.
pub fn check_measurement_bound<T: Real + Serialize, S: AsRef<str>>(
    rho: &DensityOperator<T>,
    b: &[S],
    c: &str,
    basis: &CMatrix<T>,
) -> Result<ChainReport<T>, EntropyError> {
    let dc = rho.space().dim_of(c)?;
    let defect = if basis.rows() == dc && basis.cols() == dc { basis.isometry_defect() } else { T::infinity() };
    if defect > T::lit(policy::<T>().reconstruction) {
        return Err(EntropyError::BadBasis { defect: defect.to_f64_lossy() });
    }
    let rotated = rho.conjugate_local(&basis.adjoint(), &[c])?;
    let measured = dephase(&rotated, c)?;
    let lhs = min_entropy(rho, &with(b, c))?.lambda;
    let rhs = min_entropy(&measured, &with(b, c))?.lambda - log2_dim::<T>(dc);
    Ok(ChainReport::new(ChainLemma::Measurement, lhs, rhs))
}

pub fn check_quantum_chain_rule<T: Real + Serialize, S: AsRef<str>>(
    rho: &DensityOperator<T>,
    b: &[S],
    c: &str,
) -> Result<ChainReport<T>, EntropyError> {
    let dc = rho.space().dim_of(c)?;
    let lhs = min_entropy(rho, &with(b, c))?.lambda;
    let rhs = min_entropy(&rho.partial_trace(&[c])?, b)?.lambda - T::lit(2.0) * log2_dim::<T>(dc);
    Ok(ChainReport::new(ChainLemma::QuantumChain, lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{PureState, RegisterSpace};
    use crate::random::{random_density, rng_from_seed};
    use crate::scalar::cr;

    fn space3(dc: usize) -> RegisterSpace {
        RegisterSpace::new(&[("x", 2), ("b", 2), ("c", dc)]).unwrap()
    }

    #[test]
    fn independent_z_gives_slack_log_z() {
        let mut rng = rng_from_seed(3);
        let xb = DensityOperator::new(RegisterSpace::new(&[("x", 2), ("b", 2)]).unwrap(), random_density::<f64>(&mut rng, 4, 4))
            .unwrap();
        let z = DensityOperator::maximally_mixed(RegisterSpace::single("z", 4).unwrap()).unwrap();
        let rho = xb.tensor(&z).unwrap();
        let r = check_classical_chain_rule(&rho, &["b"], "z").unwrap();
        assert!((r.slack - 2.0).abs() < 1e-7, "{}", r.slack);
        assert!(r.holds);
    }

    #[test]
    fn copy_of_uniform_x_is_tight() {
        // ½ Σ_x |x⟩⟨x|_X ⊗ |x⟩⟨x|_Z, B trivial of dim 1
        let space = RegisterSpace::new(&[("x", 2), ("b", 1), ("z", 2)]).unwrap();
        let rho = DensityOperator::<f64>::classical(space, &[0.5, 0.0, 0.0, 0.5]).unwrap();
        let r = check_classical_chain_rule(&rho, &["b"], "z").unwrap();
        assert!(r.lhs.abs() < 1e-7);
        assert!(r.slack.abs() < 1e-7);
    }

    #[test]
    fn non_classical_z_rejected() {
        let s = 1.0 / 2f64.sqrt();
        let space = RegisterSpace::new(&[("x", 2), ("z", 2)]).unwrap();
        let psi = PureState::new(space, vec![cr(s), cr(0.0), cr(0.0), cr(s)]).unwrap();
        let rho = psi.density().unwrap();
        assert!(matches!(
            check_classical_chain_rule(&rho, &[] as &[&str], "z"),
            Err(EntropyError::NonClassical { .. })
        ));
    }

    #[test]
    fn trivial_c_measurement_and_quantum_equal() {
        let mut rng = rng_from_seed(8);
        let rho = DensityOperator::new(space3(1), random_density::<f64>(&mut rng, 4, 4)).unwrap();
        let basis = CMatrix::identity(1);
        let m = check_measurement_bound(&rho, &["b"], "c", &basis).unwrap();
        assert!(m.slack.abs() < 1e-7);
        let q = check_quantum_chain_rule(&rho, &["b"], "c").unwrap();
        assert!(q.slack.abs() < 1e-7);
    }

    #[test]
    fn bad_basis_rejected() {
        let mut rng = rng_from_seed(8);
        let rho = DensityOperator::new(space3(2), random_density::<f64>(&mut rng, 8, 8)).unwrap();
        let basis = CMatrix::from_real_diag(&[1.0, 0.5]);
        assert!(matches!(check_measurement_bound(&rho, &["b"], "c", &basis), Err(EntropyError::BadBasis { .. })));
    }

    #[test]
    fn random_instances_hold() {
        let mut rng = rng_from_seed(21);
        for _ in 0..5 {
            let rho = DensityOperator::new(space3(2), random_density::<f64>(&mut rng, 8, 3)).unwrap();
            assert!(check_quantum_chain_rule(&rho, &["b"], "c").unwrap().holds);
            let u = crate::random::haar_unitary::<f64>(&mut rng, 2);
            assert!(check_measurement_bound(&rho, &["b"], "c", &u).unwrap().holds);
            let z = dephase(&rho, "c").unwrap();
            assert!(check_classical_chain_rule(&z, &["b"], "c").unwrap().holds);
        }
    }
}
