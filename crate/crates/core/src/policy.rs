//! Numeric tolerances and size caps.
//!
//! One policy object per precision is installed process-wide; every module reads
//! its thresholds from [`policy`]. The defaults for `f64` are the values quoted in
//! the README; `f32` gets proportionally looser thresholds.

use std::any::TypeId;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericPolicy {
    /// Hermiticity, positivity and normalization checks on constructed states.
    pub validity: f64,
    /// Reconstruction and round-trip errors (decompositions, isometries, marginals).
    pub reconstruction: f64,
    /// Allowed slack when an inequality between two computed quantities is checked.
    pub check: f64,
    /// Violations larger than this are treated as logic errors rather than noise.
    pub noise_ceiling: f64,
    /// Largest total dimension for which dense operators are formed.
    pub dim_cap: usize,
    /// Largest total dimension for state vectors (pure states and protocol executions).
    pub pure_dim_cap: usize,
    /// Target duality gap of the min-entropy solver (absolute, on the trace of the witness).
    pub sdp_gap: f64,
    /// Largest gap between the solver's upper and lower bounds accepted as converged.
    pub sdp_accept: f64,
    /// Newton-step cap of the min-entropy solver.
    pub sdp_max_newton: usize,
    /// Iteration cap of the distance-from-uniform descent.
    pub uniform_max_iters: usize,
    /// Stopping threshold on the improvement of the distance-from-uniform objective.
    pub uniform_improvement: f64,
    /// Sweep cap of the Jacobi eigensolver.
    pub jacobi_max_sweeps: usize,
}

impl NumericPolicy {
    pub const fn double() -> Self {
        NumericPolicy {
            validity: 1e-10,
            reconstruction: 1e-9,
            check: 1e-7,
            noise_ceiling: 1e-6,
            dim_cap: 64,
            pure_dim_cap: 4096,
            sdp_gap: 1e-11,
            sdp_accept: 1e-8,
            sdp_max_newton: 2000,
            uniform_max_iters: 2000,
            uniform_improvement: 1e-9,
            jacobi_max_sweeps: 100,
        }
    }

    pub const fn single() -> Self {
        NumericPolicy {
            validity: 1e-4,
            reconstruction: 1e-3,
            check: 1e-3,
            noise_ceiling: 1e-2,
            dim_cap: 64,
            pure_dim_cap: 4096,
            sdp_gap: 1e-5,
            sdp_accept: 1e-3,
            sdp_max_newton: 2000,
            uniform_max_iters: 2000,
            uniform_improvement: 1e-5,
            jacobi_max_sweeps: 100,
        }
    }
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self::double()
    }
}

static DOUBLE: RwLock<Option<NumericPolicy>> = RwLock::new(None);
static SINGLE: RwLock<Option<NumericPolicy>> = RwLock::new(None);

fn slot<T: Real>() -> &'static RwLock<Option<NumericPolicy>> {
    if TypeId::of::<T>() == TypeId::of::<f32>() {
        &SINGLE
    } else {
        &DOUBLE
    }
}

/// The policy currently in force for precision `T`.
pub fn policy<T: Real>() -> NumericPolicy {
    slot::<T>()
        .read()
        .ok()
        .and_then(|g| *g)
        .unwrap_or_else(T::default_policy)
}

/// Installs `p` for precision `T`; returns the previous policy.
pub fn install<T: Real>(p: NumericPolicy) -> NumericPolicy {
    let prev = policy::<T>();
    if let Ok(mut g) = slot::<T>().write() {
        *g = Some(p);
    }
    prev
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precisions_have_separate_defaults() {
        assert_eq!(policy::<f64>().validity, 1e-10);
        assert_eq!(policy::<f32>().validity, 1e-4);
    }
}
