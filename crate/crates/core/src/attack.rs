//! Generic binding attack against resource-free string commitments.
//!
//! Alice commits to a uniform superposition over the preimage `f⁻¹(z)` of a balanced
//! hash, keeping a copy of the string in `x_prime`. When Bob's view barely depends on
//! the hash bit, Uhlmann's theorem gives a unitary on Alice's side that moves the `z = 0`
//! commitment close to the `z = 1` one, transcript branch by transcript branch.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::entropy::{min_entropy_cq, EntropyError};
use crate::hashing::{self, best_hash, leftover_hash_bound, BalancedHash, HashError};
use crate::linalg::{complete_basis, orthonormalize_against, svd, CMatrix, LinalgError, PureState, RegisterSpace};
use crate::protocol::{
    execute_honest, remove_quantum_resource, remove_resource, Branch, ExecutionResult, Input, Owner, ProtocolError,
    ProtocolIR, ResourceKind,
};
use crate::scalar::{czero, Real};

/// Label of Alice's copy of the committed string.
pub const X_PRIME: &str = "x_prime";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    RemoveResource,
    Execute,
    Hiding,
    MinEntropy,
    BestHash,
    Superposition,
    Uhlmann,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stage::RemoveResource => "remove_resource",
            Stage::Execute => "execute",
            Stage::Hiding => "hiding",
            Stage::MinEntropy => "min_entropy",
            Stage::BestHash => "best_hash",
            Stage::Superposition => "superposition",
            Stage::Uhlmann => "uhlmann",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AttackError {
    #[error("{stage}: {source}")]
    Protocol { stage: Stage, source: ProtocolError },
    #[error("{stage}: {source}")]
    Entropy { stage: Stage, source: EntropyError },
    #[error("{stage}: {source}")]
    Hashing { stage: Stage, source: HashError },
    #[error("protocol still uses a commitment resource")]
    ResourceNotRemoved,
    #[error("string length {0} exceeds the attack limit {max}", max = hashing::MAX_ELL)]
    EllTooLarge(usize),
    #[error("cannot align a zero-norm state")]
    ZeroNorm,
    #[error("branch families live on different register spaces")]
    BranchMismatch,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl AttackError {
    /// Whether the failure came from the min-entropy solver not converging.
    pub fn is_non_convergence(&self) -> bool {
        matches!(self, AttackError::Entropy { source: EntropyError::NonConvergence { .. }, .. })
    }
}

fn at<E>(stage: Stage) -> impl Fn(E) -> AttackError
where
    E: Into<StageSource>,
{
    move |e| match e.into() {
        StageSource::Protocol(source) => AttackError::Protocol { stage, source },
        StageSource::Entropy(source) => AttackError::Entropy { stage, source },
        StageSource::Hashing(source) => AttackError::Hashing { stage, source },
    }
}

enum StageSource {
    Protocol(ProtocolError),
    Entropy(EntropyError),
    Hashing(HashError),
}

impl From<ProtocolError> for StageSource {
    fn from(e: ProtocolError) -> Self {
        StageSource::Protocol(e)
    }
}

impl From<EntropyError> for StageSource {
    fn from(e: EntropyError) -> Self {
        StageSource::Entropy(e)
    }
}

impl From<HashError> for StageSource {
    fn from(e: HashError) -> Self {
        StageSource::Hashing(e)
    }
}

/// Post-commit state after committing to a superposition over a preimage.
#[derive(Debug, Clone)]
pub struct SuperpositionCommit<T: Real> {
    pub z: u8,
    pub target_set: Vec<usize>,
    /// Protocol registers followed by `x_prime`.
    pub space: RegisterSpace,
    /// Alice's registers, `x_prime` last.
    pub alice: Vec<String>,
    /// Bob's registers including the resource simulation.
    pub bob: Vec<String>,
    /// One normalized-in-total branch per transcript, sorted by transcript.
    pub branches: Vec<Branch<T>>,
}

/// Runs `(1/√|X_z|) Σ_{x ∈ f⁻¹(z)} |x⟩_X |x⟩_{X'}` through the commit phase of a
/// resource-free protocol.
pub fn commit_superposition<T: Real>(p: &ProtocolIR, f: &BalancedHash, z: u8) -> Result<SuperpositionCommit<T>, AttackError> {
    if p.resources.kind != ResourceKind::None {
        return Err(AttackError::ResourceNotRemoved);
    }
    let exec = execute_honest::<T>(p, Input::Uniform).map_err(at(Stage::Execute))?;
    superposition_from(&exec, f, z)
}

/// As [`commit_superposition`], reusing the per-input runs of a uniform execution. The
/// superposed execution is the linear combination of the per-input branch vectors.
pub fn superposition_from<T: Real>(
    exec: &ExecutionResult<T>,
    f: &BalancedHash,
    z: u8,
) -> Result<SuperpositionCommit<T>, AttackError> {
    let p = &exec.protocol;
    if p.resources.kind != ResourceKind::None {
        return Err(AttackError::ResourceNotRemoved);
    }
    if f.ell() != p.ell {
        return Err(AttackError::Hashing { stage: Stage::Superposition, source: HashError::EllMismatch { hash: f.ell(), state: p.ell } });
    }
    let nx = 1usize << p.ell;
    let space = exec.space.merge(&RegisterSpace::single(X_PRIME, nx)?)?;
    let cap = crate::policy::policy::<T>().pure_dim_cap;
    if space.total_dim() > cap {
        return Err(LinalgError::DimensionCap { dim: space.total_dim(), cap }.into());
    }
    let target_set = f.preimage(z);
    let amp = T::one() / T::from_usize_lossy(target_set.len()).sqrt();
    let d = exec.space.total_dim();
    let mut by_transcript: BTreeMap<Vec<u8>, Vec<_>> = BTreeMap::new();
    for run in exec.runs.iter().filter(|r| target_set.contains(&r.x)) {
        for b in &run.branches {
            let v = by_transcript.entry(b.transcript.clone()).or_insert_with(|| vec![czero(); d * nx]);
            for (i, a) in b.amplitudes.iter().enumerate() {
                v[i * nx + run.x] = *a * amp;
            }
        }
    }
    let branches = by_transcript.into_iter().map(|(transcript, amplitudes)| Branch { transcript, amplitudes }).collect();
    let mut alice = exec.registers_of(Owner::Alice);
    alice.push(X_PRIME.to_string());
    let bob = exec.registers_of(Owner::Bob);
    Ok(SuperpositionCommit { z, target_set, space, alice, bob, branches })
}

/// Orthonormal basis of the column space of `k`.
fn column_basis<T: Real>(k: &CMatrix<T>) -> Vec<Vec<crate::scalar::C<T>>> {
    let scale = (0..k.cols()).map(|j| crate::linalg::norm(&k.column(j))).fold(T::zero(), T::max);
    let tiny = T::epsilon() * T::lit(64.0) * scale;
    let mut basis: Vec<Vec<_>> = Vec::new();
    for j in 0..k.cols() {
        let mut v = k.column(j);
        if orthonormalize_against(&mut v, &basis) > tiny {
            basis.push(v);
        }
    }
    basis
}

#[derive(Debug, Clone)]
pub struct UhlmannResult<T: Real> {
    /// Acts on the Alice registers in the order given.
    pub unitary: CMatrix<T>,
    /// `|⟨ψ¹|(U ⊗ 1)|ψ⁰⟩|` for the normalized inputs.
    pub overlap: T,
    /// `1 − overlap²`, evaluated from the phase-aligned residual so it stays accurate near 0.
    pub infidelity: T,
}

/// Unitary on `alice_part` maximizing the overlap of `(U ⊗ 1)ψ⁰` with `ψ¹`.
///
/// With `ψ` reshaped to `K` (Alice rows), the overlap is `tr(U K⁰ K¹†)`, maximized by the
/// singular factors of `K⁰K¹†`; these are found from thin factorizations `K = Q R`.
pub fn uhlmann_unitary<T: Real, S: AsRef<str>>(
    psi0: &PureState<T>,
    psi1: &PureState<T>,
    alice_part: &[S],
) -> Result<UhlmannResult<T>, AttackError> {
    if psi0.space() != psi1.space() {
        return Err(LinalgError::SpaceMismatch.into());
    }
    let k0 = psi0.bipartite_matrix(alice_part)?;
    let k1 = psi1.bipartite_matrix(alice_part)?;
    uhlmann_matrices(&k0, &k1)
}

fn uhlmann_matrices<T: Real>(k0: &CMatrix<T>, k1: &CMatrix<T>) -> Result<UhlmannResult<T>, AttackError> {
    let da = k0.rows();
    let q0 = column_basis(k0);
    let q1 = column_basis(k1);
    if q0.is_empty() || q1.is_empty() {
        return Err(AttackError::ZeroNorm);
    }
    let q0m = CMatrix::from_columns(&q0, da);
    let q1m = CMatrix::from_columns(&q1, da);
    let r0 = q0m.adjoint_mul(k0);
    let r1 = q1m.adjoint_mul(k1);
    let n = r0.matmul(&r1.adjoint());
    let s = svd(&n);
    let paired = q0.len().min(q1.len());
    let a = q0m.matmul(&s.u);
    let b = q1m.matmul(&s.v);
    let a_full = complete_basis((0..paired).map(|k| a.column(k)).collect(), da);
    let b_full = complete_basis((0..paired).map(|k| b.column(k)).collect(), da);
    let unitary = b_full.matmul(&a_full.adjoint());
    let (n0, n1) = (k0.frobenius_norm(), k1.frobenius_norm());
    let moved = unitary.matmul(k0).scale_real(T::one() / n0);
    let target = k1.scale_real(T::one() / n1);
    let inner = target.adjoint_mul(&moved).trace();
    let overlap = inner.norm().min(T::one());
    // ‖u − e^{iφ}v‖² = 2(1 − |⟨v|u⟩|) for φ = arg⟨v|u⟩
    let phase = if inner.norm() > T::zero() { inner / inner.norm() } else { crate::scalar::C::new(T::one(), T::zero()) };
    let residual = (&moved - &target.scale(phase)).frobenius_norm();
    let infidelity = (residual * residual * (T::one() + overlap) * T::lit(0.5)).min(T::one());
    Ok(UhlmannResult { unitary, overlap, infidelity })
}

#[derive(Debug, Clone)]
pub struct BranchAttack<T: Real> {
    pub transcript: Vec<u8>,
    pub p0: T,
    pub p1: T,
    pub overlap: T,
    /// `½‖p₀ |u⟩⟨u| − p₁ |v⟩⟨v|‖₁` after applying the unitary.
    pub distance: T,
    /// Identity when the branch is absent from either family.
    pub unitary: CMatrix<T>,
}

#[derive(Debug, Clone)]
pub struct ConditionedAttack<T: Real> {
    pub branches: Vec<BranchAttack<T>>,
    /// Trace distance between the transformed family and the target, transcript included.
    pub distance: T,
}

/// Per-transcript Uhlmann unitaries moving `state0` towards `state1`.
pub fn classical_conditioned_attack<T: Real>(
    state0: &SuperpositionCommit<T>,
    state1: &SuperpositionCommit<T>,
) -> Result<ConditionedAttack<T>, AttackError> {
    if state0.space != state1.space || state0.alice != state1.alice {
        return Err(AttackError::BranchMismatch);
    }
    let sp = state0.space.split(&state0.alice)?;
    let da = sp.row_dim;
    let reshape = |b: &Branch<T>| {
        let mut k = CMatrix::zeros(da, sp.col_dim);
        for (f, a) in b.amplitudes.iter().enumerate() {
            k[(sp.row_of[f], sp.col_of[f])] = *a;
        }
        k
    };
    let mut keys: Vec<&Vec<u8>> = state0.branches.iter().chain(&state1.branches).map(|b| &b.transcript).collect();
    keys.sort();
    keys.dedup();
    let half = T::lit(0.5);
    let mut branches = Vec::with_capacity(keys.len());
    for t in keys {
        let b0 = state0.branches.iter().find(|b| &b.transcript == t);
        let b1 = state1.branches.iter().find(|b| &b.transcript == t);
        let p0 = b0.map(|b| b.probability()).unwrap_or(T::zero());
        let p1 = b1.map(|b| b.probability()).unwrap_or(T::zero());
        let (unitary, overlap, infidelity) = match (b0, b1) {
            (Some(b0), Some(b1)) if p0 > T::zero() && p1 > T::zero() => {
                let r = uhlmann_matrices(&reshape(b0), &reshape(b1)).map_err(|e| match e {
                    AttackError::Linalg(l) => AttackError::Protocol { stage: Stage::Uhlmann, source: l.into() },
                    other => other,
                })?;
                (r.unitary, r.overlap, r.infidelity)
            }
            _ => (CMatrix::identity(da), T::zero(), T::one()),
        };
        // eigenvalues of p₀|u⟩⟨u| − p₁|v⟩⟨v| give ‖·‖₁ = √((p₀−p₁)² + 4p₀p₁(1 − |⟨u|v⟩|²))
        let disc = (p0 - p1) * (p0 - p1) + T::lit(4.0) * p0 * p1 * infidelity;
        branches.push(BranchAttack { transcript: t.clone(), p0, p1, overlap, distance: half * disc.sqrt(), unitary });
    }
    let distance = branches.iter().map(|b| b.distance).sum::<T>().min(T::one());
    Ok(ConditionedAttack { branches, distance })
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchSummary {
    pub transcript: String,
    pub p0: f64,
    pub p1: f64,
    pub overlap: f64,
    pub distance: f64,
    pub unitary_dim: usize,
    pub unitarity_defect: f64,
}

/// Outcome of the full attack pipeline with every intermediate quantity.
#[derive(Debug, Clone, Serialize)]
pub struct AttackCertificate {
    pub protocol: String,
    pub ell: usize,
    pub n: usize,
    pub resource: ResourceKind,
    /// Truth table of the hash, `f(0)` first.
    pub hash: String,
    pub z: u8,
    /// Measured hiding parameter ε of the honest commitment.
    pub epsilon: f64,
    /// `√(2ε)`
    pub epsilon_tilde: f64,
    /// `H_min(X|BC)` of the resource-free protocol.
    pub h_min: f64,
    /// `½√(2^{1−H_min})`
    pub leftover: f64,
    /// `ε̃ + ½√(2^{1−H_min})`
    pub delta: f64,
    /// `2√δ`
    pub delta_bound: f64,
    /// `2√δ` at zero smoothing (ε̃ = 0).
    pub delta_bound_exact: f64,
    /// Distance between Bob's views of the two preimage mixtures.
    pub split_distance: f64,
    /// `√(2·split_distance)`, the guarantee for the conditioned attack.
    pub uhlmann_bound: f64,
    pub achieved_distance: f64,
    /// `1 − achieved_distance`: a lower bound on what a cheating Alice achieves with unitaries.
    pub implied_binding: f64,
    pub chain_holds: bool,
    pub branches: Vec<BranchSummary>,
}

/// Strips the commitment resource, whatever its kind.
pub fn resource_free(p: &ProtocolIR) -> Result<ProtocolIR, ProtocolError> {
    match p.resources.kind {
        ResourceKind::ClassicalBc => remove_resource(p),
        ResourceKind::QubitBc => remove_quantum_resource(p),
        ResourceKind::None => p.clone().validate(),
    }
}

fn bits(t: &[u8]) -> String {
    t.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()
}

/// The full pipeline: remove the resource, measure hiding and `H_min(X|BC)`, pick the
/// best balanced hash, commit to the `z = 0` preimage and steer it to `z = 1`.
pub fn synthesize<T: Real>(p: &ProtocolIR) -> Result<AttackCertificate, AttackError> {
    if p.ell > hashing::MAX_ELL {
        return Err(AttackError::EllTooLarge(p.ell));
    }
    let sim = resource_free(p).map_err(at(Stage::RemoveResource))?;
    let exec = execute_honest::<T>(&sim, Input::Uniform).map_err(at(Stage::Execute))?;
    let epsilon = crate::protocol::measure_hiding(&exec).map_err(at(Stage::Hiding))?;
    let view = exec.bob_view(true).map_err(at(Stage::MinEntropy))?;
    let h_min = min_entropy_cq(&view).map_err(at(Stage::MinEntropy))?.lambda;
    let best = best_hash(&view).map_err(at(Stage::BestHash))?;
    let s0 = superposition_from(&exec, &best.f, 0)?;
    let s1 = superposition_from(&exec, &best.f, 1)?;
    let attack = classical_conditioned_attack(&s0, &s1)?;

    let f = |v: T| v.to_f64_lossy();
    let epsilon = f(epsilon);
    let h_min = f(h_min);
    let epsilon_tilde = (2.0 * epsilon).sqrt();
    let leftover = leftover_hash_bound(0.0, h_min);
    let delta = epsilon_tilde + leftover;
    let delta_bound = 2.0 * delta.sqrt();
    let achieved = f(attack.distance);
    let split = f(best.distance);
    let branches = attack
        .branches
        .iter()
        .map(|b| BranchSummary {
            transcript: bits(&b.transcript),
            p0: f(b.p0),
            p1: f(b.p1),
            overlap: f(b.overlap),
            distance: f(b.distance),
            unitary_dim: b.unitary.rows(),
            unitarity_defect: f(b.unitary.isometry_defect()),
        })
        .collect();
    Ok(AttackCertificate {
        protocol: p.name.clone(),
        ell: p.ell,
        n: p.n(),
        resource: p.resources.kind,
        hash: best.f.table_string(),
        z: 0,
        epsilon,
        epsilon_tilde,
        h_min,
        leftover,
        delta,
        delta_bound,
        delta_bound_exact: 2.0 * leftover.sqrt(),
        split_distance: split,
        uhlmann_bound: (2.0 * split).sqrt(),
        achieved_distance: achieved,
        implied_binding: (1.0 - achieved).max(0.0),
        chain_holds: achieved <= delta_bound + 1e-7,
        branches,
    })
}
