//! Certified lower bounds on the smooth min-entropy.
//!
//! Any sub-normalized state within purified distance ε of ρ gives a lower bound on
//! `H_min^ε`. Candidates are built from the spectrum of ρ: a global rescaling,
//! clipping the largest eigenvalues, and deleting the top eigenvectors.

use serde::{Deserialize, Serialize};

use super::{min_entropy, EntropyError};
use crate::linalg::{eig_hermitian, CMatrix, DensityOperator, HermitianEigen};
use crate::metrics::purified_distance;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothMode {
    ExactZero,
    LowerBoundCandidates,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothPolicy {
    pub epsilon: f64,
    pub mode: SmoothMode,
    pub candidate_count: usize,
}

impl SmoothPolicy {
    pub fn exact_zero() -> Self {
        SmoothPolicy { epsilon: 0.0, mode: SmoothMode::ExactZero, candidate_count: 0 }
    }

    pub fn candidates(epsilon: f64, candidate_count: usize) -> Result<Self, EntropyError> {
        let p = SmoothPolicy { epsilon, mode: SmoothMode::LowerBoundCandidates, candidate_count };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), EntropyError> {
        if !(self.epsilon >= 0.0 && self.epsilon < 1.0) {
            return Err(EntropyError::InvalidPolicy(format!("epsilon {} outside [0, 1)", self.epsilon)));
        }
        if self.mode == SmoothMode::ExactZero && self.epsilon != 0.0 {
            return Err(EntropyError::InvalidPolicy("exact_zero mode requires epsilon = 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothResult<T: Real> {
    /// Certified lower bound on `H_min^ε`.
    pub value: T,
    /// `H_min` of the unsmoothed state.
    pub unsmoothed: T,
    /// Candidates verified to lie in the ε-ball.
    pub accepted: usize,
    /// Set when no candidate passed verification and `value` is the unsmoothed entropy.
    pub fallback: bool,
}

fn spectral<T: Real>(eig: &HermitianEigen<T>, f: impl Fn(usize, T) -> T) -> CMatrix<T> {
    let vals: Vec<T> = eig.values.iter().enumerate().map(|(i, &l)| f(i, l.max(T::zero()))).collect();
    let n = vals.len();
    let v = &eig.vectors;
    CMatrix::from_fn(n, n, |i, j| {
        (0..n).fold(crate::scalar::czero(), |acc, k| acc + v[(i, k)] * v[(j, k)].conj() * vals[k])
    })
}

/// Candidate matrices in a fixed order; each is checked against the ε-ball by the caller.
fn candidates<T: Real>(rho: &DensityOperator<T>, eps: T) -> Result<Vec<CMatrix<T>>, EntropyError> {
    let eig = eig_hermitian(rho.matrix())?;
    let mut out = Vec::new();
    // Global rescaling: P(ρ, sρ) = √(1 − s) for normalized ρ.
    let s = T::one() - eps * eps * T::lit(1.0 - 1e-6);
    out.push(rho.matrix().scale_real(s));

    // Clip the spectrum at the smallest level whose distance stays inside the ball.
    let clip = |level: T| spectral(&eig, |_, l| l.min(level));
    let inside = |m: &CMatrix<T>| -> bool {
        DensityOperator::new(rho.space().clone(), m.clone())
            .ok()
            .and_then(|c| purified_distance(rho, &c).ok())
            .map(|p| p <= eps)
            .unwrap_or(false)
    };
    let (mut lo, mut hi) = (T::zero(), eig.max());
    for _ in 0..60 {
        let mid = (lo + hi) * T::lit(0.5);
        if inside(&clip(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    out.push(clip(hi));

    // Delete the k largest eigencomponents.
    for k in 1..eig.values.len() {
        out.push(spectral(&eig, |i, l| if i < k { T::zero() } else { l }));
    }
    Ok(out)
}

/// `H_min^ε(A|B)` lower bound under the given policy.
pub fn smooth_min_entropy<T: Real, S: AsRef<str>>(
    rho: &DensityOperator<T>,
    condition_on: &[S],
    policy: &SmoothPolicy,
) -> Result<SmoothResult<T>, EntropyError> {
    policy.validate()?;
    let base = min_entropy(rho, condition_on)?.lambda;
    if policy.mode == SmoothMode::ExactZero || policy.epsilon == 0.0 {
        return Ok(SmoothResult { value: base, unsmoothed: base, accepted: 0, fallback: false });
    }
    let eps = T::lit(policy.epsilon);
    let mut best = base;
    let mut accepted = 0;
    for m in candidates(rho, eps)? {
        if accepted >= policy.candidate_count {
            break;
        }
        let Ok(cand) = DensityOperator::new(rho.space().clone(), m) else { continue };
        let Ok(p) = purified_distance(rho, &cand) else { continue };
        if p > eps {
            continue;
        }
        accepted += 1;
        if let Ok(r) = min_entropy(&cand, condition_on) {
            best = best.max(r.lambda);
        }
    }
    Ok(SmoothResult { value: best, unsmoothed: base, accepted, fallback: accepted == 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RegisterSpace;

    fn classical(probs: &[f64]) -> DensityOperator<f64> {
        DensityOperator::classical(RegisterSpace::single("x", probs.len()).unwrap(), probs).unwrap()
    }

    #[test]
    fn policy_validation() {
        assert!(SmoothPolicy::candidates(1.0, 4).is_err());
        let bad = SmoothPolicy { epsilon: 0.1, mode: SmoothMode::ExactZero, candidate_count: 0 };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn zero_epsilon_is_min_entropy() {
        let rho = classical(&[0.5, 0.25, 0.25]);
        let r = smooth_min_entropy(&rho, &[] as &[&str], &SmoothPolicy::exact_zero()).unwrap();
        assert_eq!(r.value, 1.0);
        assert!(!r.fallback);
    }

    #[test]
    fn small_outlier_does_not_lower_the_bound() {
        let rho = classical(&[0.97, 0.01, 0.01, 0.01]);
        let p = SmoothPolicy::candidates(0.1, 8).unwrap();
        let r = smooth_min_entropy(&rho, &[] as &[&str], &p).unwrap();
        assert!(r.value >= r.unsmoothed);
        assert!(r.accepted > 0);
    }

    #[test]
    fn tiny_epsilon_falls_back() {
        // the spike removal and clipping are far outside a 1e-9 ball; rescaling is inside
        let rho = classical(&[0.5, 0.5]);
        let p = SmoothPolicy::candidates(1e-9, 0).unwrap();
        let r = smooth_min_entropy(&rho, &[] as &[&str], &p).unwrap();
        assert!(r.fallback);
        assert_eq!(r.value, r.unsmoothed);
    }
}
