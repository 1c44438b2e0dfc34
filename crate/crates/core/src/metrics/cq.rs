use super::{hermitian_trace_norm, MetricsError};
use crate::linalg::{CMatrix, DensityOperator, RegisterSpace};
use crate::policy::policy;
use crate::scalar::Real;

/// `Σ_x P(x) |x⟩⟨x| ⊗ ρ_B^x` over ℓ-bit strings `x`.
///
/// Symbols are stored as integers whose binary expansion (most significant bit
/// first) is the string. Symbols absent from the alphabet have weight zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CQState<T: Real> {
    ell: usize,
    symbols: Vec<usize>,
    weights: Vec<T>,
    conditionals: Vec<DensityOperator<T>>,
    quantum_space: RegisterSpace,
}

impl<T: Real> CQState<T> {
    pub fn new(
        ell: usize,
        symbols: Vec<usize>,
        weights: Vec<T>,
        conditionals: Vec<DensityOperator<T>>,
    ) -> Result<Self, MetricsError> {
        let pol = policy::<T>();
        if symbols.is_empty() {
            return Err(MetricsError::InvalidCq("empty alphabet".into()));
        }
        if symbols.len() != weights.len() || symbols.len() != conditionals.len() {
            return Err(MetricsError::InvalidCq("alphabet, weights and conditionals differ in length".into()));
        }
        if ell >= usize::BITS as usize {
            return Err(MetricsError::InvalidCq(format!("string length {ell}")));
        }
        let mut seen = symbols.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != symbols.len() {
            return Err(MetricsError::InvalidCq("repeated symbol".into()));
        }
        if let Some(&s) = symbols.iter().find(|&&s| s >> ell != 0) {
            return Err(MetricsError::InvalidCq(format!("symbol {s} does not fit in {ell} bits")));
        }
        let tol = T::lit(pol.validity);
        if let Some(w) = weights.iter().find(|w| !(**w >= -tol)) {
            return Err(MetricsError::InvalidCq(format!("negative weight {w}")));
        }
        let total: T = weights.iter().copied().sum();
        if total > T::one() + tol {
            return Err(MetricsError::InvalidCq(format!("weights sum to {total}")));
        }
        let quantum_space = conditionals[0].space().clone();
        for rho in &conditionals {
            if rho.space() != &quantum_space {
                return Err(MetricsError::SpaceMismatch);
            }
            if (rho.trace() - T::one()).abs() > T::lit(pol.reconstruction) {
                return Err(MetricsError::InvalidCq(format!("conditional has trace {}", rho.trace())));
            }
        }
        let weights = weights.into_iter().map(|w| w.max(T::zero())).collect();
        Ok(CQState { ell, symbols, weights, conditionals, quantum_space })
    }

    /// Uniform weights over the full alphabet `{0,1}^ℓ`; `conditionals[x]` belongs to `x`.
    pub fn uniform(ell: usize, conditionals: Vec<DensityOperator<T>>) -> Result<Self, MetricsError> {
        let n = 1usize << ell;
        if conditionals.len() != n {
            return Err(MetricsError::InvalidCq(format!("expected {n} conditionals, got {}", conditionals.len())));
        }
        let w = T::one() / T::from_usize_lossy(n);
        Self::new(ell, (0..n).collect(), vec![w; n], conditionals)
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn conditionals(&self) -> &[DensityOperator<T>] {
        &self.conditionals
    }

    pub fn quantum_space(&self) -> &RegisterSpace {
        &self.quantum_space
    }

    /// `2^ℓ`
    pub fn alphabet_size(&self) -> usize {
        1 << self.ell
    }

    pub fn total_weight(&self) -> T {
        self.weights.iter().copied().sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.total_weight() - T::one()).abs() <= T::lit(policy::<T>().validity)
    }

    pub fn require_normalized(&self) -> Result<(), MetricsError> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(MetricsError::NotNormalized(self.total_weight().to_f64_lossy()))
        }
    }

    /// True if every string of length ℓ appears.
    pub fn has_full_alphabet(&self) -> bool {
        self.symbols.len() == self.alphabet_size()
    }

    /// True if the alphabet is full and all weights are equal.
    pub fn is_uniform(&self) -> bool {
        let w = T::one() / T::from_usize_lossy(self.alphabet_size());
        let tol = T::lit(policy::<T>().validity);
        self.has_full_alphabet() && self.weights.iter().all(|&p| (p - w).abs() <= tol)
    }

    pub fn position(&self, x: usize) -> Option<usize> {
        self.symbols.iter().position(|&s| s == x)
    }

    pub fn weight_of(&self, x: usize) -> T {
        self.position(x).map(|i| self.weights[i]).unwrap_or(T::zero())
    }

    /// `P(x) ρ_B^x`, the zero operator for absent symbols.
    pub fn weighted_conditional(&self, x: usize) -> CMatrix<T> {
        match self.position(x) {
            Some(i) => self.conditionals[i].matrix().scale_real(self.weights[i]),
            None => {
                let d = self.quantum_space.total_dim();
                CMatrix::zeros(d, d)
            }
        }
    }

    /// `ρ_B = Σ_x P(x) ρ_B^x`
    pub fn marginal_b(&self) -> CMatrix<T> {
        let d = self.quantum_space.total_dim();
        let mut acc = CMatrix::zeros(d, d);
        for (w, rho) in self.weights.iter().zip(&self.conditionals) {
            acc = &acc + &rho.matrix().scale_real(*w);
        }
        acc
    }

    /// The string for symbol `x`, most significant bit first.
    pub fn symbol_string(&self, x: usize) -> String {
        bit_string(x, self.ell)
    }

    /// The block-diagonal operator on `x_label ⊗ B`.
    pub fn to_density(&self, x_label: &str) -> Result<DensityOperator<T>, MetricsError> {
        let xs = RegisterSpace::single(x_label, self.alphabet_size())?;
        let space = xs.merge(&self.quantum_space)?;
        let db = self.quantum_space.total_dim();
        let cap = policy::<T>().dim_cap;
        if space.total_dim() > cap {
            return Err(crate::linalg::LinalgError::DimensionCap { dim: space.total_dim(), cap }.into());
        }
        let mut m = CMatrix::zeros(space.total_dim(), space.total_dim());
        for (i, &x) in self.symbols.iter().enumerate() {
            let block = self.conditionals[i].matrix();
            let w = self.weights[i];
            for r in 0..db {
                for c in 0..db {
                    m[(x * db + r, x * db + c)] = block[(r, c)] * w;
                }
            }
        }
        Ok(DensityOperator::new(space, m)?)
    }
}

pub(crate) fn bit_string(x: usize, ell: usize) -> String {
    (0..ell).rev().map(|k| if (x >> k) & 1 == 1 { '1' } else { '0' }).collect()
}

/// `½ Σ_x ‖P_a(x) ρ_a^x − P_b(x) ρ_b^x‖₁`, the trace distance of the embedded block-diagonal operators.
pub fn cq_mixture_distance<T: Real>(a: &CQState<T>, b: &CQState<T>) -> Result<T, MetricsError> {
    if a.ell != b.ell {
        return Err(MetricsError::AlphabetMismatch);
    }
    let mut sa = a.symbols.clone();
    let mut sb = b.symbols.clone();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return Err(MetricsError::AlphabetMismatch);
    }
    if a.quantum_space != b.quantum_space {
        return Err(MetricsError::SpaceMismatch);
    }
    let total: T = sa
        .iter()
        .map(|&x| hermitian_trace_norm(&(&a.weighted_conditional(x) - &b.weighted_conditional(x))))
        .sum();
    Ok(total * T::lit(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::trace_distance;
    use crate::random::{random_density, rng_from_seed};

    fn qubit() -> RegisterSpace {
        RegisterSpace::single("b", 2).unwrap()
    }

    #[test]
    fn identical_states_have_zero_distance() {
        let mm = DensityOperator::<f64>::maximally_mixed(qubit()).unwrap();
        let a = CQState::uniform(1, vec![mm.clone(), mm]).unwrap();
        assert_eq!(cq_mixture_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn disjoint_weights_reduce_to_total_variation() {
        let mm = DensityOperator::<f64>::maximally_mixed(qubit()).unwrap();
        let a = CQState::new(1, vec![0, 1], vec![1.0, 0.0], vec![mm.clone(), mm.clone()]).unwrap();
        let b = CQState::new(1, vec![0, 1], vec![0.0, 1.0], vec![mm.clone(), mm]).unwrap();
        assert!((cq_mixture_distance(&a, &b).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn blockwise_matches_full_matrix() {
        let mut rng = rng_from_seed(12);
        let mk = |rng: &mut _| DensityOperator::new(qubit(), random_density::<f64>(rng, 2, 2)).unwrap();
        let a = CQState::new(1, vec![0, 1], vec![0.3, 0.7], vec![mk(&mut rng), mk(&mut rng)]).unwrap();
        let b = CQState::new(1, vec![0, 1], vec![0.6, 0.4], vec![mk(&mut rng), mk(&mut rng)]).unwrap();
        let full = trace_distance(&a.to_density("x").unwrap(), &b.to_density("x").unwrap()).unwrap();
        assert!((cq_mixture_distance(&a, &b).unwrap() - full).abs() < 1e-9);
    }

    #[test]
    fn invalid_states_rejected() {
        let mm = DensityOperator::<f64>::maximally_mixed(qubit()).unwrap();
        assert!(CQState::new(1, vec![0, 0], vec![0.5, 0.5], vec![mm.clone(), mm.clone()]).is_err());
        assert!(CQState::new(1, vec![0, 2], vec![0.5, 0.5], vec![mm.clone(), mm.clone()]).is_err());
        assert!(CQState::new(1, vec![0, 1], vec![0.8, 0.5], vec![mm.clone(), mm.clone()]).is_err());
        assert!(CQState::<f64>::new(1, vec![], vec![], vec![]).is_err());
    }

    #[test]
    fn symbol_strings_are_msb_first() {
        assert_eq!(bit_string(1, 3), "001");
        assert_eq!(bit_string(6, 3), "110");
    }
}
