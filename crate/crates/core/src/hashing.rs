//! Balanced one-bit hash functions on ℓ-bit strings and the hashing step of the attack.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{CMatrix, DensityOperator};
use crate::metrics::{hermitian_trace_norm, CQState, MetricsError};
use crate::scalar::Real;

pub const MAX_ELL: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HashError {
    #[error("string length {0} outside 1..={MAX_ELL}")]
    EllOutOfRange(usize),
    #[error("truth table of length {len} is not balanced ({ones} ones)")]
    Unbalanced { len: usize, ones: usize },
    #[error("hash is defined on {hash} bits but the state has {state}")]
    EllMismatch { hash: usize, state: usize },
    #[error("state must have uniform weights over all of {{0,1}}^ℓ")]
    NotUniform,
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// `f: {0,1}^ℓ → {0,1}` with exactly `2^{ℓ−1}` preimages of each bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BalancedHash {
    ell: usize,
    table: Vec<u8>,
}

impl BalancedHash {
    pub fn new(ell: usize, table: Vec<u8>) -> Result<Self, HashError> {
        if ell == 0 || ell > MAX_ELL {
            return Err(HashError::EllOutOfRange(ell));
        }
        let ones = table.iter().filter(|&&b| b != 0).count();
        if table.len() != 1 << ell || ones * 2 != table.len() || table.iter().any(|&b| b > 1) {
            return Err(HashError::Unbalanced { len: table.len(), ones });
        }
        Ok(BalancedHash { ell, table })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    pub fn eval(&self, x: usize) -> u8 {
        self.table[x]
    }

    pub fn preimage(&self, z: u8) -> Vec<usize> {
        (0..self.table.len()).filter(|&x| self.table[x] == z).collect()
    }

    /// Truth table as a string of `f(0) f(1) …`.
    pub fn table_string(&self) -> String {
        self.table.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HashFamily {
    pub ell: usize,
    pub members: Vec<BalancedHash>,
    /// `max(0, max_{x≠x'} Pr_f[f(x) = f(x')] − ½)`
    pub universality_defect: f64,
}

impl HashFamily {
    pub fn collision_frequency(&self, x: usize, y: usize) -> f64 {
        let hits = self.members.iter().filter(|f| f.eval(x) == f.eval(y)).count();
        hits as f64 / self.members.len() as f64
    }
}

fn check_ell(ell: usize) -> Result<(), HashError> {
    if ell == 0 || ell > MAX_ELL {
        Err(HashError::EllOutOfRange(ell))
    } else {
        Ok(())
    }
}

/// Affine maps `x ↦ a·x ⊕ b` with `a ≠ 0`; every such map is balanced.
pub fn build_toeplitz_family(ell: usize) -> Result<HashFamily, HashError> {
    check_ell(ell)?;
    let n = 1usize << ell;
    let mut members = Vec::with_capacity(2 * (n - 1));
    for a in 1..n {
        for b in 0..2u8 {
            let table = (0..n).map(|x| ((a & x).count_ones() as u8 & 1) ^ b).collect();
            members.push(BalancedHash::new(ell, table)?);
        }
    }
    let mut family = HashFamily { ell, members, universality_defect: 0.0 };
    let mut worst: f64 = 0.0;
    for x in 0..n {
        for y in (x + 1)..n {
            worst = worst.max(family.collision_frequency(x, y) - 0.5);
        }
    }
    family.universality_defect = worst.max(0.0);
    Ok(family)
}

/// Every balanced function, in lexicographic order of `(f(0), …, f(2^ℓ − 1))`.
pub struct BalancedIter {
    ell: usize,
    bits: u32,
    next: Option<u32>,
}

impl Iterator for BalancedIter {
    type Item = BalancedHash;

    fn next(&mut self) -> Option<BalancedHash> {
        let v = self.next?;
        // next larger integer with the same popcount
        let c = v & v.wrapping_neg();
        let r = v + c;
        let succ = (((r ^ v) >> 2) / c) | r;
        self.next = if succ >> self.bits == 0 && succ > v { Some(succ) } else { None };
        let table = (0..self.bits).map(|i| ((v >> (self.bits - 1 - i)) & 1) as u8).collect();
        Some(BalancedHash { ell: self.ell, table })
    }
}

pub fn enumerate_balanced(ell: usize) -> Result<BalancedIter, HashError> {
    check_ell(ell)?;
    let bits = 1u32 << ell;
    let first = (1u32 << (bits / 2)) - 1;
    Ok(BalancedIter { ell, bits, next: Some(first) })
}

fn require_uniform<T: Real>(rho: &CQState<T>, ell: usize) -> Result<(), HashError> {
    if rho.ell() != ell {
        return Err(HashError::EllMismatch { hash: ell, state: rho.ell() });
    }
    if !rho.is_uniform() {
        return Err(HashError::NotUniform);
    }
    Ok(())
}

fn preimage_mixture<T: Real>(rho: &CQState<T>, f: &BalancedHash, z: u8) -> CMatrix<T> {
    let xs = f.preimage(z);
    let d = rho.quantum_space().total_dim();
    let mut acc = CMatrix::zeros(d, d);
    for &x in &xs {
        let i = rho.position(x).expect("full alphabet");
        acc = &acc + rho.conditionals()[i].matrix();
    }
    acc.scale_real(T::one() / T::from_usize_lossy(xs.len()))
}

/// The normalized mixtures of the conditionals over `f⁻¹(0)` and `f⁻¹(1)`.
pub fn split_state<T: Real>(
    rho: &CQState<T>,
    f: &BalancedHash,
) -> Result<(DensityOperator<T>, DensityOperator<T>), HashError> {
    require_uniform(rho, f.ell())?;
    let space = rho.quantum_space().clone();
    let m0 = preimage_mixture(rho, f, 0);
    let m1 = preimage_mixture(rho, f, 1);
    Ok((
        DensityOperator::new(space.clone(), m0).map_err(MetricsError::from)?,
        DensityOperator::new(space, m1).map_err(MetricsError::from)?,
    ))
}

/// `D(ρ^{f,0}, ρ^{f,1})` computed from the signed sum `(2/2^ℓ) Σ_x (−1)^{f(x)} ρ^x`.
pub fn split_distance<T: Real>(rho: &CQState<T>, f: &BalancedHash) -> Result<T, HashError> {
    require_uniform(rho, f.ell())?;
    Ok(split_distance_unchecked(rho, f))
}

fn split_distance_unchecked<T: Real>(rho: &CQState<T>, f: &BalancedHash) -> T {
    let d = rho.quantum_space().total_dim();
    let mut acc = CMatrix::zeros(d, d);
    for (i, &x) in rho.symbols().iter().enumerate() {
        let m = rho.conditionals()[i].matrix();
        acc = if f.eval(x) == 0 { &acc + m } else { &acc - m };
    }
    let half_n = T::from_usize_lossy(rho.alphabet_size() / 2);
    hermitian_trace_norm(&acc) * T::lit(0.5) / half_n
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestHash<T: Real> {
    pub f: BalancedHash,
    pub distance: T,
    /// Number of balanced functions examined.
    pub searched: usize,
}

/// Exhaustive minimum of `D(ρ^{f,0}, ρ^{f,1})` over all balanced `f`; ties go to the
/// lexicographically smallest truth table.
pub fn best_hash<T: Real>(rho: &CQState<T>) -> Result<BestHash<T>, HashError> {
    check_ell(rho.ell())?;
    require_uniform(rho, rho.ell())?;
    let tie = T::lit(1e-12);
    let mut best: Option<(BalancedHash, T)> = None;
    let mut searched = 0;
    for f in enumerate_balanced(rho.ell())? {
        searched += 1;
        let d = split_distance_unchecked(rho, &f);
        match &best {
            Some((_, bd)) if d >= *bd - tie => {}
            _ => best = Some((f, d)),
        }
    }
    let (f, distance) = best.expect("at least one balanced function");
    Ok(BestHash { f, distance, searched })
}

/// `ε + ½ √(2^{1 − H_min})`, the distance from uniform guaranteed for a random member.
pub fn leftover_hash_bound<T: Real>(epsilon: T, h_min: T) -> T {
    epsilon + T::lit(0.5) * T::lit(2.0).powf(T::one() - h_min).sqrt()
}

/// Twice the leftover-hash bound: some balanced `f` splits the state at least this well.
pub fn good_hash_bound<T: Real>(epsilon: T, h_min: T) -> T {
    T::lit(2.0) * leftover_hash_bound(epsilon, h_min)
}

/// Distance from uniform of `Z = f(X)` given `(B, F)` with `F` uniform over the family.
///
/// With X uniform and every f balanced, Z is a uniform bit for each f; the minimum over
/// `σ_{BF}` is attained block by block at `σ_f = ρ^{f,0}`, giving `avg_f ½ D(ρ^{f,0}, ρ^{f,1})`.
pub fn family_distance_from_uniform<T: Real>(rho: &CQState<T>, family: &HashFamily) -> Result<T, HashError> {
    require_uniform(rho, family.ell)?;
    let total: T = family.members.iter().map(|f| split_distance_unchecked(rho, f)).sum();
    Ok(total * T::lit(0.5) / T::from_usize_lossy(family.members.len()))
}
