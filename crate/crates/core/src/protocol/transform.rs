//! Resource removal: Bob simulates the commitment resource himself.
//!
//! The resulting protocol has no resource, is no longer binding, and is exactly as
//! hiding towards a Bob who ignores the simulation registers (listed in `c_registers`).

use std::collections::{HashMap, VecDeque};

use super::{Party, ProtocolError, ProtocolIR, RegisterDecl, ResourceDecl, ResourceKind, RoundSpec, SendKind};

fn fresh(taken: &mut Vec<String>, base: &str) -> String {
    let mut k = 0;
    loop {
        let name = format!("{base}{k}");
        if !taken.contains(&name) {
            taken.push(name.clone());
            return name;
        }
        k += 1;
    }
}

fn kind_name(k: ResourceKind) -> String {
    match k {
        ResourceKind::ClassicalBc => "classical_bc",
        ResourceKind::QubitBc => "qubit_bc",
        ResourceKind::None => "none",
    }
    .to_string()
}

/// The gate part of a round, with the send stripped; `None` if nothing is left.
fn gate_only(r: &RoundSpec) -> Option<RoundSpec> {
    r.gate.as_ref()?;
    Some(RoundSpec { send: None, ..r.clone() })
}

fn skeleton(p: &ProtocolIR, expected: ResourceKind, label: &'static str) -> Result<(ProtocolIR, Vec<String>), ProtocolError> {
    let p = p.clone().validate()?;
    if p.resources.kind != expected {
        return Err(ProtocolError::WrongResource { expected: label, found: kind_name(p.resources.kind) });
    }
    let mut taken = p.input_names();
    taken.extend(p.registers.iter().map(|r| r.name.clone()));
    let out = ProtocolIR {
        name: format!("{}-simulated", p.name),
        resources: ResourceDecl::none(),
        rounds: Vec::new(),
        simulated_from: Some(p.resources),
        ..p.clone()
    };
    Ok((out, taken))
}

/// Replaces classical bit commitments by copies held by Bob.
///
/// Alice's commitments become copies she hands to Bob (`C_A*`), Bob's stay in his own
/// copies (`C_B*`); every opening becomes Bob publishing the matching copy.
pub fn remove_resource(p: &ProtocolIR) -> Result<ProtocolIR, ProtocolError> {
    let (mut out, mut taken) = skeleton(p, ResourceKind::ClassicalBc, "classical_bc")?;
    let mut pending: HashMap<(Party, String), VecDeque<String>> = HashMap::new();
    let src = p.clone().validate()?;
    for round in &src.rounds {
        let Some(send) = round.send.as_ref().filter(|s| matches!(s.kind, SendKind::Commit | SendKind::Open)) else {
            out.rounds.push(round.clone());
            continue;
        };
        out.rounds.extend(gate_only(round));
        for r in &send.registers {
            let key = (round.actor, r.clone());
            if send.kind == SendKind::Commit {
                let base = if round.actor == Party::Alice { "C_A" } else { "C_B" };
                let c = fresh(&mut taken, base);
                // starts with the committer, who fills it in
                out.registers.push(RegisterDecl { name: c.clone(), dim: 2, owner: round.actor });
                out.c_registers.push(c.clone());
                let mut copy = RoundSpec::gate(round.actor, "copy", &[r, &c]).in_phase(round.phase);
                if round.actor == Party::Alice {
                    copy = copy.with_send(SendKind::Quantum, &[&c]);
                }
                out.rounds.push(copy);
                pending.entry(key).or_default().push_back(c);
            } else {
                let c = pending.get_mut(&key).and_then(|q| q.pop_front()).expect("validated opening");
                out.rounds.push(RoundSpec::send(Party::Bob, SendKind::Classical, &[&c]).in_phase(round.phase));
            }
        }
    }
    out.validate()
}

/// Replaces qubit commitments by handing the committed registers straight to Bob.
pub fn remove_quantum_resource(p: &ProtocolIR) -> Result<ProtocolIR, ProtocolError> {
    let (mut out, _) = skeleton(p, ResourceKind::QubitBc, "qubit_bc")?;
    let src = p.clone().validate()?;
    for round in &src.rounds {
        let Some(send) = round.send.as_ref().filter(|s| matches!(s.kind, SendKind::Commit | SendKind::Open)) else {
            out.rounds.push(round.clone());
            continue;
        };
        out.rounds.extend(gate_only(round));
        let regs: Vec<&str> = send.registers.iter().map(String::as_str).collect();
        match (send.kind, round.actor) {
            (SendKind::Commit, actor) => {
                out.c_registers.extend(send.registers.iter().cloned());
                if actor == Party::Alice {
                    out.rounds.push(RoundSpec::send(actor, SendKind::Quantum, &regs).in_phase(round.phase));
                }
            }
            // Bob already holds what Alice opens.
            (_, Party::Alice) => {}
            (_, Party::Bob) => out.rounds.push(RoundSpec::send(Party::Bob, SendKind::Quantum, &regs).in_phase(round.phase)),
        }
    }
    out.validate()
}
