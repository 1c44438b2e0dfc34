//! Branch-based honest execution.
//!
//! Each input string is run separately. The global state is a list of branches, one per
//! transcript, each holding the unnormalized joint vector of every register; its squared
//! norm is the probability of that transcript.

use std::collections::BTreeSet;

use super::plan::{Op, Owner, Plan, RevealPlan};
use super::{ProtocolError, ProtocolIR};
use crate::linalg::{norm, CMatrix, DensityOperator, LinalgError, PureState, RegisterSpace};
use crate::metrics::{dist_from_uniform, CQState};
use crate::policy::policy;
use crate::scalar::{c, czero, Real, C};

/// Branches lighter than this are dropped.
const DROP_WEIGHT: f64 = 1e-15;

/// Label of the transcript register in Bob's view.
pub const TRANSCRIPT_LABEL: &str = "transcript";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Input {
    Fixed(usize),
    /// Every string with probability `2^{−ℓ}`.
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch<T: Real> {
    pub transcript: Vec<u8>,
    /// Unnormalized; the squared norm is the branch probability.
    pub amplitudes: Vec<C<T>>,
}

impl<T: Real> Branch<T> {
    pub fn probability(&self) -> T {
        let n = norm(&self.amplitudes);
        n * n
    }

    /// The branch state, normalized.
    pub fn state(&self, space: &RegisterSpace) -> Result<PureState<T>, LinalgError> {
        PureState::from_unnormalized(space.clone(), self.amplitudes.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InputRun<T: Real> {
    pub x: usize,
    pub weight: T,
    pub branches: Vec<Branch<T>>,
}

/// Joint state at the end of the commit phase.
#[derive(Debug, Clone)]
pub struct ExecutionResult<T: Real> {
    pub protocol: ProtocolIR,
    pub space: RegisterSpace,
    /// Ownership of each register of `space`.
    pub owners: Vec<Owner>,
    pub c_registers: Vec<String>,
    pub runs: Vec<InputRun<T>>,
}

struct LocalMap {
    offsets: Vec<usize>,
    bases: Vec<usize>,
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn local_map(dims: &[usize], on: &[usize]) -> LocalMap {
    let st = strides(dims);
    let total: usize = dims.iter().product();
    let d_on: usize = on.iter().map(|&r| dims[r]).product();
    let offsets = (0..d_on)
        .map(|mut li| {
            let mut off = 0;
            for &r in on.iter().rev() {
                off += (li % dims[r]) * st[r];
                li /= dims[r];
            }
            off
        })
        .collect();
    let bases = (0..total).filter(|&f| on.iter().all(|&r| (f / st[r]).is_multiple_of(dims[r]))).collect();
    LocalMap { offsets, bases }
}

fn apply_local<T: Real>(amps: &mut [C<T>], u: &CMatrix<T>, map: &LocalMap) {
    let d = map.offsets.len();
    let mut v = vec![czero(); d];
    for &b in &map.bases {
        for (k, &o) in map.offsets.iter().enumerate() {
            v[k] = amps[b + o];
        }
        for (i, &o) in map.offsets.iter().enumerate() {
            amps[b + o] = u.row(i).iter().zip(&v).fold(czero(), |acc, (a, x)| acc + *a * *x);
        }
    }
}

fn matches(pattern: &[Option<u8>], transcript: &[u8]) -> bool {
    pattern.iter().zip(transcript).all(|(p, t)| p.is_none_or(|b| b == *t))
}

fn run_ops<T: Real>(space: &RegisterSpace, ops: &[Op], mut branches: Vec<Branch<T>>) -> Vec<Branch<T>> {
    let dims = space.dims();
    let st = strides(dims);
    let drop = T::lit(DROP_WEIGHT);
    for op in ops {
        match op {
            Op::Gate { when, u, on } => {
                let map = local_map(dims, on);
                let ut: CMatrix<T> = u.map(|z| c(T::lit(z.re), T::lit(z.im)));
                for b in &mut branches {
                    if when.as_ref().is_none_or(|w| matches(w, &b.transcript)) {
                        apply_local(&mut b.amplitudes, &ut, &map);
                    }
                }
            }
            Op::Measure { reg, bits } => {
                let (d, s) = (dims[*reg], st[*reg]);
                let mut next = Vec::with_capacity(branches.len() * d);
                for b in branches {
                    for k in 0..d {
                        let amps: Vec<C<T>> = b
                            .amplitudes
                            .iter()
                            .enumerate()
                            .map(|(f, a)| if (f / s) % d == k { *a } else { czero() })
                            .collect();
                        let out = Branch { transcript: b.transcript.clone(), amplitudes: amps };
                        if out.probability() > drop {
                            let mut out = out;
                            out.transcript.extend((0..*bits).rev().map(|i| ((k >> i) & 1) as u8));
                            next.push(out);
                        }
                    }
                }
                branches = next;
            }
        }
    }
    branches
}

fn inputs_of<T: Real>(ell: usize, input: Input) -> Result<Vec<(usize, T)>, ProtocolError> {
    let n = 1usize << ell;
    match input {
        Input::Fixed(x) if x < n => Ok(vec![(x, T::one())]),
        Input::Fixed(x) => Err(ProtocolError::invalid("input", format!("input {x} does not fit in {ell} bits"))),
        Input::Uniform => Ok((0..n).map(|x| (x, T::one() / T::from_usize_lossy(n))).collect()),
    }
}

fn initial<T: Real>(space: &RegisterSpace, ell: usize, x: usize) -> Branch<T> {
    let st = strides(space.dims());
    let mut amps = vec![czero(); space.total_dim()];
    // inputs are the first ℓ registers, x0 most significant
    let f: usize = (0..ell).map(|i| ((x >> (ell - 1 - i)) & 1) * st[i]).sum();
    amps[f] = c(T::one(), T::zero());
    Branch { transcript: Vec::new(), amplitudes: amps }
}

fn check_cap<T: Real>(space: &RegisterSpace) -> Result<(), ProtocolError> {
    let cap = policy::<T>().pure_dim_cap;
    if space.total_dim() > cap {
        return Err(LinalgError::DimensionCap { dim: space.total_dim(), cap }.into());
    }
    Ok(())
}

/// Runs the commit phase honestly.
pub fn execute_honest<T: Real>(p: &ProtocolIR, input: Input) -> Result<ExecutionResult<T>, ProtocolError> {
    let plan = Plan::build(p)?;
    check_cap::<T>(&plan.space)?;
    let runs = inputs_of::<T>(p.ell, input)?
        .into_iter()
        .map(|(x, weight)| {
            let branches = run_ops(&plan.space, &plan.commit_ops, vec![initial(&plan.space, p.ell, x)]);
            InputRun { x, weight, branches }
        })
        .collect();
    let c_registers = plan.c_regs.iter().map(|&r| plan.space.labels()[r].clone()).collect();
    Ok(ExecutionResult { protocol: p.clone(), space: plan.space, owners: plan.owners, c_registers, runs })
}

impl<T: Real> ExecutionResult<T> {
    pub fn registers_of(&self, owner: Owner) -> Vec<String> {
        self.space.labels().iter().zip(&self.owners).filter(|(_, o)| **o == owner).map(|(l, _)| l.clone()).collect()
    }

    /// Bob's registers outside the resource simulation.
    pub fn bob_registers(&self) -> Vec<String> {
        self.registers_of(Owner::Bob).into_iter().filter(|l| !self.c_registers.contains(l)).collect()
    }

    /// Distinct transcripts over every input, sorted.
    pub fn transcripts(&self) -> Vec<Vec<u8>> {
        let set: BTreeSet<Vec<u8>> = self.runs.iter().flat_map(|r| r.branches.iter().map(|b| b.transcript.clone())).collect();
        set.into_iter().collect()
    }

    pub fn branch_count(&self) -> usize {
        self.runs.iter().map(|r| r.branches.len()).sum()
    }

    /// `Σ_x P(x)|x⟩⟨x| ⊗ ρ^x` with ρ^x on the transcript and Bob's registers; `with_c` adds
    /// the registers simulating the resource.
    pub fn bob_view(&self, with_c: bool) -> Result<CQState<T>, ProtocolError> {
        let mut regs = self.bob_registers();
        if with_c {
            regs.extend(self.c_registers.iter().cloned());
        }
        let transcripts = self.transcripts();
        let dt = transcripts.len();
        let mut view_regs: Vec<(String, usize)> = Vec::new();
        if dt > 1 || regs.is_empty() {
            view_regs.push((TRANSCRIPT_LABEL.to_string(), dt));
        }
        for r in &regs {
            view_regs.push((r.clone(), self.space.dim_of(r)?));
        }
        let view_space = RegisterSpace::new(&view_regs)?;
        let cap = policy::<T>().dim_cap;
        if view_space.total_dim() > cap {
            return Err(LinalgError::DimensionCap { dim: view_space.total_dim(), cap }.into());
        }
        let sp = self.space.split(&regs)?;
        let db = sp.row_dim;
        let mut conds = Vec::with_capacity(self.runs.len());
        for run in &self.runs {
            let mut m = CMatrix::zeros(dt * db, dt * db);
            for b in &run.branches {
                let t = transcripts.binary_search(&b.transcript).expect("transcript listed");
                let mut k = CMatrix::zeros(db, sp.col_dim);
                for (f, a) in b.amplitudes.iter().enumerate() {
                    k[(sp.row_of[f], sp.col_of[f])] = *a;
                }
                let block = k.matmul(&k.adjoint());
                for i in 0..db {
                    for j in 0..db {
                        m[(t * db + i, t * db + j)] = m[(t * db + i, t * db + j)] + block[(i, j)];
                    }
                }
            }
            let tr = m.trace().re;
            conds.push(DensityOperator::new(view_space.clone(), m.hermitian_part().scale_real(T::one() / tr))?);
        }
        let symbols = self.runs.iter().map(|r| r.x).collect();
        let weights = self.runs.iter().map(|r| r.weight).collect();
        Ok(CQState::new(self.protocol.ell, symbols, weights, conds)?)
    }

    /// Full `ρ_XABC` including the transcript, with X a classical copy of the input
    /// labeled `X`. Only available within the density-matrix cap.
    pub fn rho_xabc(&self) -> Result<DensityOperator<T>, ProtocolError> {
        let transcripts = self.transcripts();
        let dt = transcripts.len();
        let nx = 1usize << self.protocol.ell;
        let d = self.space.total_dim();
        let mut regs = vec![("X".to_string(), nx), (TRANSCRIPT_LABEL.to_string(), dt)];
        regs.extend(self.space.labels().iter().cloned().zip(self.space.dims().iter().copied()));
        let space = RegisterSpace::new(&regs)?;
        let cap = policy::<T>().dim_cap;
        if space.total_dim() > cap {
            return Err(LinalgError::DimensionCap { dim: space.total_dim(), cap }.into());
        }
        let mut m = CMatrix::zeros(space.total_dim(), space.total_dim());
        for run in &self.runs {
            for b in &run.branches {
                let t = transcripts.binary_search(&b.transcript).expect("transcript listed");
                let off = (run.x * dt + t) * d;
                for i in 0..d {
                    for j in 0..d {
                        m[(off + i, off + j)] = b.amplitudes[i] * b.amplitudes[j].conj() * run.weight;
                    }
                }
            }
        }
        Ok(DensityOperator::new(space, m)?)
    }
}

/// Hiding parameter of the commit phase: distance of Bob's view from uniform.
pub fn measure_hiding<T: Real>(exec: &ExecutionResult<T>) -> Result<T, ProtocolError> {
    let view = exec.bob_view(false)?;
    Ok(dist_from_uniform(&view)?.value)
}

/// Outcome of an honest open.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenResult<T: Real> {
    /// For each input, the distribution of the string Bob reads.
    pub distributions: Vec<(usize, Vec<(usize, T)>)>,
    /// Probability, averaged over the inputs, that Bob reads the committed string.
    pub success_probability: T,
}

/// Runs both phases honestly and reads the revealed string.
pub fn honest_open<T: Real>(p: &ProtocolIR, input: Input) -> Result<OpenResult<T>, ProtocolError> {
    let plan = Plan::build(p)?;
    check_cap::<T>(&plan.space)?;
    let dims = plan.space.dims();
    let st = strides(dims);
    let n = 1usize << p.ell;
    let inputs = inputs_of::<T>(p.ell, input)?;
    let mut distributions = Vec::new();
    let mut success = T::zero();
    for (x, weight) in inputs {
        let branches = run_ops(&plan.space, &plan.commit_ops, vec![initial(&plan.space, p.ell, x)]);
        let branches = run_ops(&plan.space, &plan.open_ops, branches);
        let mut dist = vec![T::zero(); n];
        for b in &branches {
            match &plan.reveal {
                RevealPlan::Transcript(pos) => {
                    let v = pos.iter().fold(0usize, |acc, &q| (acc << 1) | b.transcript[q] as usize);
                    dist[v] = dist[v] + b.probability();
                }
                RevealPlan::Registers(regs) => {
                    for (f, a) in b.amplitudes.iter().enumerate() {
                        let v = regs.iter().fold(0usize, |acc, &(r, bits)| (acc << bits) | ((f / st[r]) % dims[r]));
                        dist[v] = dist[v] + a.norm_sqr();
                    }
                }
            }
        }
        success = success + weight * dist[x];
        distributions.push((x, dist.into_iter().enumerate().filter(|(_, q)| *q > T::zero()).collect()));
    }
    Ok(OpenResult { distributions, success_probability: success })
}
