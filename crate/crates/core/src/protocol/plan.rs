//! Lowering of a protocol description to a flat list of operations.
//!
//! Ownership and transcript layout do not depend on measurement outcomes, so both are
//! resolved here once. Classical bit commitments get a hidden resource register that
//! receives a copy of the committed bit; opening it measures that copy.

use std::collections::HashMap;

use serde::Serialize;

use super::gates::named_gate;
use super::{GateSpec, Party, Phase, ProtocolError, ProtocolIR, ResourceKind, Reveal, SendKind};
use crate::linalg::{CMatrix, RegisterSpace};
use crate::policy::policy;
use crate::scalar::c;

/// Largest supported string length.
pub const MAX_ELL: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Owner {
    Alice,
    Bob,
    /// Held by the commitment resource, inaccessible to both parties.
    Resource,
}

impl From<Party> for Owner {
    fn from(p: Party) -> Self {
        match p {
            Party::Alice => Owner::Alice,
            Party::Bob => Owner::Bob,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Op {
    Gate { when: Option<Vec<Option<u8>>>, u: CMatrix<f64>, on: Vec<usize> },
    /// Computational-basis measurement appending `bits` transcript bits.
    Measure { reg: usize, bits: usize },
}

#[derive(Debug, Clone)]
pub(crate) enum RevealPlan {
    Transcript(Vec<usize>),
    /// Register index and its bit width.
    Registers(Vec<(usize, usize)>),
}

#[derive(Debug, Clone)]
pub(crate) struct Plan {
    pub space: RegisterSpace,
    pub commit_ops: Vec<Op>,
    pub open_ops: Vec<Op>,
    /// Ownership at the end of the commit phase.
    pub owners: Vec<Owner>,
    pub c_regs: Vec<usize>,
    pub reveal: RevealPlan,
}

struct Commitment {
    actor: Party,
    register: String,
    /// Resource copy for a classical commitment.
    copy: Option<usize>,
    opened: bool,
}

fn bits_of(dim: usize) -> Option<usize> {
    (dim >= 2 && dim.is_power_of_two()).then(|| dim.trailing_zeros() as usize)
}

fn valid_name(s: &str) -> bool {
    let mut ch = s.chars();
    matches!(ch.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && ch.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn bad(path: impl Into<String>, message: impl Into<String>) -> ProtocolError {
    ProtocolError::invalid(path, message)
}

fn find(index: &HashMap<String, usize>, name: &str, path: String) -> Result<usize, ProtocolError> {
    index.get(name).copied().ok_or_else(|| ProtocolError::invalid(path, format!("unknown register `{name}`")))
}

fn parse_pattern(s: &str) -> Option<Vec<Option<u8>>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(Some(0)),
            '1' => Some(Some(1)),
            '*' => Some(None),
            _ => None,
        })
        .collect()
}

fn gate_matrix(g: &GateSpec, dims: &[usize]) -> Result<CMatrix<f64>, String> {
    match g {
        GateSpec::Named(n) => named_gate(n, None, dims),
        GateSpec::Parametrized { name, angle } => named_gate(name, Some(*angle), dims),
        GateSpec::Matrix { matrix } => {
            let d: usize = dims.iter().product();
            if matrix.len() != d || matrix.iter().any(|r| r.len() != d) {
                return Err(format!("matrix must be {d}×{d} for registers of dimensions {dims:?}"));
            }
            let u = CMatrix::from_fn(d, d, |i, j| c(matrix[i][j][0], matrix[i][j][1]));
            let defect = u.isometry_defect();
            if defect > policy::<f64>().reconstruction {
                return Err(format!("matrix is not unitary (defect {defect:.3e})"));
            }
            Ok(u)
        }
    }
}

impl Plan {
    pub fn build(p: &ProtocolIR) -> Result<Plan, ProtocolError> {
        if p.ell == 0 || p.ell > MAX_ELL {
            return Err(bad("ell", format!("string length must be in 1..={MAX_ELL}, got {}", p.ell)));
        }
        if p.resources.kind == ResourceKind::None && (p.resources.n_a + p.resources.n_b + p.resources.n) > 0 {
            return Err(bad("resources", "resource counts given without a resource"));
        }

        let mut labels: Vec<(String, usize)> = p.input_names().into_iter().map(|n| (n, 2)).collect();
        let mut owners: Vec<Owner> = vec![Owner::Alice; p.ell];
        let mut index: HashMap<String, usize> = labels.iter().enumerate().map(|(i, (n, _))| (n.clone(), i)).collect();
        for (i, r) in p.registers.iter().enumerate() {
            let path = format!("registers[{i}]");
            if !valid_name(&r.name) {
                return Err(bad(format!("{path}.name"), format!("invalid register name `{}`", r.name)));
            }
            if index.contains_key(&r.name) {
                return Err(bad(format!("{path}.name"), format!("register `{}` declared twice", r.name)));
            }
            if r.dim == 0 {
                return Err(bad(format!("{path}.dim"), "dimension must be positive"));
            }
            index.insert(r.name.clone(), labels.len());
            labels.push((r.name.clone(), r.dim));
            owners.push(r.owner.into());
        }

        let mut commit_ops = Vec::new();
        let mut open_ops = Vec::new();
        let mut commitments: Vec<Commitment> = Vec::new();
        let (mut used_a, mut used_b, mut used_q) = (0usize, 0usize, 0usize);
        let mut transcript = 0usize;
        let mut owners_at_commit: Option<Vec<Owner>> = None;

        for (ri, round) in p.rounds.iter().enumerate() {
            let rp = format!("rounds[{ri}]");
            if round.phase == Phase::Open && owners_at_commit.is_none() {
                owners_at_commit = Some(owners.clone());
            }
            if round.phase == Phase::Commit && owners_at_commit.is_some() {
                return Err(bad(format!("{rp}.phase"), "commit-phase round after the open phase began"));
            }
            let ops = if round.phase == Phase::Commit { &mut commit_ops } else { &mut open_ops };
            let actor: Owner = round.actor.into();

            let when = match &round.when {
                None => None,
                Some(s) => {
                    let pat = parse_pattern(s)
                        .ok_or_else(|| bad(format!("{rp}.when"), format!("pattern `{s}` may only contain 0, 1, *")))?;
                    if pat.len() > transcript {
                        return Err(bad(
                            format!("{rp}.when"),
                            format!("pattern has {} bits but the transcript has {transcript}", pat.len()),
                        ));
                    }
                    Some(pat)
                }
            };

            if let Some(g) = &round.gate {
                if round.on.is_empty() {
                    return Err(bad(format!("{rp}.on"), "gate needs at least one register"));
                }
                let mut on = Vec::new();
                for (k, name) in round.on.iter().enumerate() {
                    let path = format!("{rp}.on[{k}]");
                    let r = find(&index, name, path.clone())?;
                    if on.contains(&r) {
                        return Err(bad(path, format!("register `{name}` listed twice")));
                    }
                    if owners[r] != actor {
                        return Err(bad(path, format!("{:?} does not hold `{name}`", round.actor)));
                    }
                    on.push(r);
                }
                let dims: Vec<usize> = on.iter().map(|&r| labels[r].1).collect();
                let u = gate_matrix(g, &dims).map_err(|m| bad(format!("{rp}.gate"), m))?;
                ops.push(Op::Gate { when, u, on });
            } else if !round.on.is_empty() {
                return Err(bad(format!("{rp}.on"), "registers given without a gate"));
            } else if when.is_some() {
                return Err(bad(format!("{rp}.when"), "condition given without a gate"));
            }

            let Some(send) = &round.send else { continue };
            let sp = format!("{rp}.send");
            if send.kind == SendKind::None {
                if !send.registers.is_empty() {
                    return Err(bad(format!("{sp}.registers"), "registers given for an empty send"));
                }
                continue;
            }
            if send.registers.is_empty() {
                return Err(bad(format!("{sp}.registers"), "send lists no registers"));
            }
            let phase_ok = match send.kind {
                SendKind::Commit => round.phase == Phase::Commit,
                SendKind::Open => round.phase == Phase::Open,
                _ => true,
            };
            if !phase_ok {
                return Err(bad(format!("{sp}.kind"), format!("{:?} send in the {:?} phase", send.kind, round.phase)));
            }
            if matches!(send.kind, SendKind::Commit | SendKind::Open) && p.resources.kind == ResourceKind::None {
                return Err(bad(format!("{sp}.kind"), "protocol declares no commitment resource"));
            }
            for (k, name) in send.registers.iter().enumerate() {
                let path = format!("{sp}.registers[{k}]");
                let r = find(&index, name, path.clone())?;
                let dim = labels[r].1;
                if send.kind != SendKind::Open && owners[r] != actor {
                    return Err(bad(path, format!("{:?} does not hold `{name}`", round.actor)));
                }
                match send.kind {
                    SendKind::None => unreachable!(),
                    SendKind::Classical => {
                        let bits = bits_of(dim)
                            .ok_or_else(|| bad(path.clone(), format!("cannot publish a register of dimension {dim}")))?;
                        ops.push(Op::Measure { reg: r, bits });
                        transcript += bits;
                    }
                    SendKind::Quantum => owners[r] = round.actor.other().into(),
                    SendKind::Commit => {
                        let copy = if p.resources.kind == ResourceKind::ClassicalBc {
                            if dim != 2 {
                                return Err(bad(path, format!("bit commitment of a register of dimension {dim}")));
                            }
                            match round.actor {
                                Party::Alice => used_a += 1,
                                Party::Bob => used_b += 1,
                            }
                            let f = labels.len();
                            let label = format!("bc{}_{}", commitments.len(), name);
                            index.insert(format!("#{label}"), f);
                            labels.push((format!("#{label}"), 2));
                            owners.push(Owner::Resource);
                            ops.push(Op::Gate { when: None, u: named_gate("copy", None, &[2, 2]).unwrap(), on: vec![r, f] });
                            Some(f)
                        } else {
                            let bits = bits_of(dim)
                                .ok_or_else(|| bad(path.clone(), format!("cannot commit a register of dimension {dim}")))?;
                            used_q += bits;
                            owners[r] = Owner::Resource;
                            None
                        };
                        commitments.push(Commitment { actor: round.actor, register: name.clone(), copy, opened: false });
                    }
                    SendKind::Open => {
                        let Some(cm) =
                            commitments.iter_mut().find(|c| !c.opened && c.actor == round.actor && &c.register == name)
                        else {
                            return Err(bad(path, format!("no open commitment of `{name}` by {:?}", round.actor)));
                        };
                        cm.opened = true;
                        match cm.copy {
                            Some(f) => {
                                ops.push(Op::Measure { reg: f, bits: 1 });
                                transcript += 1;
                            }
                            None => owners[r] = round.actor.other().into(),
                        }
                    }
                }
            }
        }

        let res = &p.resources;
        match res.kind {
            ResourceKind::ClassicalBc if used_a > res.n_a || used_b > res.n_b => {
                return Err(bad(
                    "resources",
                    format!("protocol uses {used_a}+{used_b} bit commitments, declares {}+{}", res.n_a, res.n_b),
                ));
            }
            ResourceKind::QubitBc if used_q > res.n => {
                return Err(bad("resources", format!("protocol commits {used_q} qubits, declares {}", res.n)));
            }
            _ => {}
        }

        let owners_commit = owners_at_commit.unwrap_or_else(|| owners.clone());
        let mut c_regs = Vec::new();
        for (k, name) in p.c_registers.iter().enumerate() {
            let path = format!("c_registers[{k}]");
            let r = find(&index, name, path.clone())?;
            if owners_commit[r] != Owner::Bob {
                return Err(bad(path, format!("`{name}` is not held by Bob after the commit phase")));
            }
            c_regs.push(r);
        }

        let reveal = match &p.reveal {
            Reveal::Transcript(pos) => {
                if pos.len() != p.ell {
                    return Err(bad("reveal", format!("reveal must give {} bits, gives {}", p.ell, pos.len())));
                }
                if let Some(&q) = pos.iter().find(|&&q| q >= transcript) {
                    return Err(bad("reveal", format!("transcript position {q} out of range ({transcript} bits)")));
                }
                RevealPlan::Transcript(pos.clone())
            }
            Reveal::Registers(names) => {
                let mut regs = Vec::new();
                for (k, name) in names.iter().enumerate() {
                    let path = format!("reveal.registers[{k}]");
                    let r = find(&index, name, path.clone())?;
                    if owners[r] != Owner::Bob {
                        return Err(bad(path, format!("`{name}` is not held by Bob at the end")));
                    }
                    let bits = bits_of(labels[r].1)
                        .ok_or_else(|| bad(path.clone(), format!("cannot read a register of dimension {}", labels[r].1)))?;
                    regs.push((r, bits));
                }
                let total: usize = regs.iter().map(|r| r.1).sum();
                if total != p.ell {
                    return Err(bad("reveal", format!("reveal must give {} bits, gives {total}", p.ell)));
                }
                RevealPlan::Registers(regs)
            }
        };

        let space = RegisterSpace::new(&labels)?;
        let cap = policy::<f64>().pure_dim_cap;
        if space.total_dim() > cap {
            return Err(bad("registers", format!("joint dimension {} exceeds the cap {cap}", space.total_dim())));
        }
        Ok(Plan { space, commit_ops, open_ops, owners: owners_commit, c_regs, reveal })
    }
}
