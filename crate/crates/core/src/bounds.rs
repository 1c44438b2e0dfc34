//! Upper bounds on the string length of a commitment built from `n` bit or qubit
//! commitments, and their comparison with measured protocol parameters.

use serde::Serialize;
use thiserror::Error;

use crate::attack::{resource_free, synthesize, AttackCertificate, AttackError, Stage};
use crate::entropy::min_entropy_cq;
use crate::policy::policy;
use crate::protocol::{execute_honest, Input, ProtocolIR, ResourceKind};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum BoundsError {
    #[error("{name} = {value} outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
    /// `(1−Δ)²/4 − √(2ε) ≤ 0`: the bound says nothing.
    #[error("bound is vacuous: log argument {argument} is not positive")]
    Vacuous { argument: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    /// `n` classical bit commitments.
    Classical,
    /// `n` qubit commitments.
    Quantum,
}

impl BoundKind {
    pub fn for_resource(kind: ResourceKind) -> Self {
        if kind == ResourceKind::QubitBc {
            BoundKind::Quantum
        } else {
            BoundKind::Classical
        }
    }
}

fn check_range<T: Real>(name: &'static str, v: T) -> Result<(), BoundsError> {
    if v >= T::zero() && v <= T::one() {
        Ok(())
    } else {
        Err(BoundsError::OutOfRange { name, value: v.to_f64_lossy() })
    }
}

/// `(1−Δ)²/4 − √(2ε)`
pub fn bound_argument<T: Real>(epsilon: T, delta: T) -> Result<T, BoundsError> {
    check_range("epsilon", epsilon)?;
    check_range("delta", delta)?;
    let one_minus = T::one() - delta;
    Ok(one_minus * one_minus / T::lit(4.0) - (T::lit(2.0) * epsilon).sqrt())
}

fn penalty<T: Real>(epsilon: T, delta: T) -> Result<T, BoundsError> {
    let arg = bound_argument(epsilon, delta)?;
    if arg <= T::zero() {
        return Err(BoundsError::Vacuous { argument: arg.to_f64_lossy() });
    }
    Ok(-T::lit(2.0) * arg.log2() - T::one())
}

/// `n − 2 log₂((1−Δ)²/4 − √(2ε)) − 1`
pub fn classical_bound<T: Real>(n: usize, epsilon: T, delta: T) -> Result<T, BoundsError> {
    Ok(T::from_usize_lossy(n) + penalty(epsilon, delta)?)
}

/// `2n − 2 log₂((1−Δ)²/4 − √(2ε)) − 1`
pub fn quantum_bound<T: Real>(n: usize, epsilon: T, delta: T) -> Result<T, BoundsError> {
    Ok(T::from_usize_lossy(2 * n) + penalty(epsilon, delta)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub n: usize,
    pub ell: usize,
    pub epsilon: f64,
    /// Lower bound on the binding parameter; the true value may be larger.
    pub delta: f64,
    pub argument: f64,
    /// False when the bound is vacuous.
    pub argument_validity: bool,
    pub rhs: Option<f64>,
    /// `ell ≤ rhs`; a vacuous bound is satisfied.
    pub satisfied: bool,
    /// `rhs − ell`
    pub margin: Option<f64>,
}

impl BoundReport {
    pub fn evaluate(kind: BoundKind, n: usize, ell: usize, epsilon: f64, delta: f64) -> Result<Self, BoundsError> {
        let argument = bound_argument(epsilon, delta)?;
        let rhs = match kind {
            BoundKind::Classical => classical_bound(n, epsilon, delta),
            BoundKind::Quantum => quantum_bound(n, epsilon, delta),
        };
        let rhs = match rhs {
            Ok(v) => Some(v),
            Err(BoundsError::Vacuous { .. }) => None,
            Err(e) => return Err(e),
        };
        let margin = rhs.map(|r| r - ell as f64);
        Ok(BoundReport {
            kind,
            n,
            ell,
            epsilon,
            delta,
            argument,
            argument_validity: rhs.is_some(),
            rhs,
            satisfied: margin.is_none_or(|m| m >= 0.0),
            margin,
        })
    }
}

/// `H_min(X|BC) ≥ H_min(X|B) − penalty` on the resource-free protocol, at zero smoothing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub kind: BoundKind,
    pub n: usize,
    /// `log₂|C|` of the registers simulating the resource.
    pub log_c: f64,
    pub h_min_xb: f64,
    pub h_min_xbc: f64,
    /// `n` for bit commitments, `2 log₂|C|` for qubit commitments.
    pub penalty: f64,
    /// `h_min_xbc − (h_min_xb − penalty)`
    pub slack: f64,
    pub holds: bool,
}

pub fn entropy_gap_check<T: Real>(p: &ProtocolIR) -> Result<GapReport, AttackError> {
    let at_p = |stage| move |source| AttackError::Protocol { stage, source };
    let at_e = |source| AttackError::Entropy { stage: Stage::MinEntropy, source };
    let sim = resource_free(p).map_err(at_p(Stage::RemoveResource))?;
    let exec = execute_honest::<T>(&sim, Input::Uniform).map_err(at_p(Stage::Execute))?;
    let without = exec.bob_view(false).map_err(at_p(Stage::MinEntropy))?;
    let with = exec.bob_view(true).map_err(at_p(Stage::MinEntropy))?;
    let h_b = min_entropy_cq(&without).map_err(at_e)?.lambda.to_f64_lossy();
    let h_bc = min_entropy_cq(&with).map_err(at_e)?.lambda.to_f64_lossy();
    let log_c: f64 = exec
        .c_registers
        .iter()
        .map(|c| exec.space.dim_of(c).map(|d| (d as f64).log2()))
        .sum::<Result<f64, _>>()?;
    let kind = BoundKind::for_resource(p.bound_kind());
    let n = p.n();
    let penalty = match kind {
        BoundKind::Classical => n as f64,
        BoundKind::Quantum => 2.0 * log_c,
    };
    let slack = h_bc - (h_b - penalty);
    Ok(GapReport { kind, n, log_c, h_min_xb: h_b, h_min_xbc: h_bc, penalty, slack, holds: slack >= -policy::<T>().check })
}

/// Everything `verify-bound` reports for one protocol.
#[derive(Debug, Clone, Serialize)]
pub struct Verification {
    pub certificate: AttackCertificate,
    pub gap: GapReport,
    pub bound: BoundReport,
}

/// Measures hiding, attacks binding and checks the resulting parameters against the bound.
pub fn verify<T: Real>(p: &ProtocolIR) -> Result<Verification, AttackError> {
    let certificate = synthesize::<T>(p)?;
    let gap = entropy_gap_check::<T>(p)?;
    let tol = policy::<T>().check;
    // measured values within tolerance of the interval ends are snapped onto it
    let snap = |v: f64| if v.abs() <= tol { 0.0 } else if (v - 1.0).abs() <= tol { 1.0 } else { v };
    let (eps, delta) = (snap(certificate.epsilon), snap(certificate.implied_binding));
    let kind = BoundKind::for_resource(p.bound_kind());
    let bound = BoundReport::evaluate(kind, p.n(), p.ell, eps, delta)
        .expect("measured distances lie in [0, 1]");
    Ok(Verification { certificate, gap, bound })
}
