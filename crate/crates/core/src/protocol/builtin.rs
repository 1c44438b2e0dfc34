//! Reference protocols.

use std::f64::consts::FRAC_PI_4;

use super::{GateSpec, Party, Phase, ProtocolError, ProtocolIR, RegisterDecl, ResourceDecl, Reveal, RoundSpec, SendKind};

/// Default angle of `naive_angle_qubit`.
pub const DEFAULT_ANGLE: f64 = FRAC_PI_4;

/// Representative names accepted by [`builtin`].
pub fn builtin_names() -> Vec<String> {
    [
        "trivial_1_from_1",
        "trivial_2_from_2",
        "trivial_3_from_3",
        "superdense_2_from_1",
        "superdense_4_from_2",
        "naive_angle_qubit",
        "hashed_compression",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

fn reg(name: &str, owner: Party) -> RegisterDecl {
    RegisterDecl { name: name.to_string(), dim: 2, owner }
}

fn strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

/// Alice commits every input bit and opens all of them.
fn trivial(ell: usize) -> ProtocolIR {
    let x: Vec<String> = (0..ell).map(|i| format!("x{i}")).collect();
    ProtocolIR {
        name: format!("trivial_{ell}_from_{ell}"),
        ell,
        resources: ResourceDecl::classical(ell, 0),
        registers: Vec::new(),
        rounds: vec![
            RoundSpec::send(Party::Alice, SendKind::Commit, &strs(&x)),
            RoundSpec::send(Party::Alice, SendKind::Open, &strs(&x)).in_phase(Phase::Open),
        ],
        reveal: Reveal::Transcript((0..ell).collect()),
        c_registers: Vec::new(),
        simulated_from: None,
    }
}

/// Two input bits per committed qubit: Alice encodes into her half of a Bell pair from
/// Bob and commits it; opening hands it to Bob, who decodes with his half.
fn superdense(n: usize) -> ProtocolIR {
    let mut registers = Vec::new();
    let mut commit = Vec::new();
    let mut open = Vec::new();
    let mut reveal = Vec::new();
    for k in 0..n {
        let (e, b) = (format!("e{k}"), format!("b{k}"));
        let (hi, lo) = (format!("x{}", 2 * k), format!("x{}", 2 * k + 1));
        registers.push(reg(&e, Party::Bob));
        registers.push(reg(&b, Party::Bob));
        commit.push(RoundSpec::gate(Party::Bob, "h", &[&e]));
        commit.push(RoundSpec::gate(Party::Bob, "cnot", &[&e, &b]).with_send(SendKind::Quantum, &[&e]));
        commit.push(RoundSpec::gate(Party::Alice, "cnot", &[&lo, &e]));
        commit.push(RoundSpec::gate(Party::Alice, "cz", &[&hi, &e]).with_send(SendKind::Commit, &[&e]));
        open.push(RoundSpec::send(Party::Alice, SendKind::Open, &[&e]).in_phase(Phase::Open));
        open.push(RoundSpec::gate(Party::Bob, "cnot", &[&e, &b]).in_phase(Phase::Open));
        open.push(RoundSpec::gate(Party::Bob, "h", &[&e]).in_phase(Phase::Open));
        reveal.push(e);
        reveal.push(b);
    }
    commit.extend(open);
    ProtocolIR {
        name: format!("superdense_{}_from_{n}", 2 * n),
        ell: 2 * n,
        resources: ResourceDecl::qubits(n),
        registers,
        rounds: commit,
        reveal: Reveal::Registers(reveal),
        c_registers: Vec::new(),
        simulated_from: None,
    }
}

/// One bit, no resource: Alice sends `|0⟩` for 0 and `sin θ|0⟩ + cos θ|1⟩` for 1, then
/// announces the bit. The two states are at trace distance `cos θ`.
pub(crate) fn naive_angle(theta: f64) -> ProtocolIR {
    let rotate = RoundSpec {
        gate: Some(GateSpec::Parametrized { name: "cry".into(), angle: std::f64::consts::PI - 2.0 * theta }),
        ..RoundSpec::gate(Party::Alice, "identity", &["x0", "q"])
    };
    let name = if theta == DEFAULT_ANGLE { "naive_angle_qubit".to_string() } else { format!("naive_angle_qubit@{theta}") };
    ProtocolIR {
        name,
        ell: 1,
        resources: ResourceDecl::none(),
        registers: vec![reg("q", Party::Alice)],
        rounds: vec![
            rotate.with_send(SendKind::Quantum, &["q"]),
            RoundSpec::send(Party::Alice, SendKind::Classical, &["x0"]).in_phase(Phase::Open),
        ],
        reveal: Reveal::Transcript(vec![0]),
        c_registers: Vec::new(),
        simulated_from: None,
    }
}

/// Three input bits, two committed: `h0 = x0 ⊕ x2`, `h1 = x1 ⊕ x2`. The opening reveals
/// the hash and then the string, which Bob never checks against each other.
fn hashed_compression() -> ProtocolIR {
    ProtocolIR {
        name: "hashed_compression".into(),
        ell: 3,
        resources: ResourceDecl::classical(2, 0),
        registers: vec![reg("h0", Party::Alice), reg("h1", Party::Alice)],
        rounds: vec![
            RoundSpec::gate(Party::Alice, "cnot", &["x0", "h0"]),
            RoundSpec::gate(Party::Alice, "cnot", &["x2", "h0"]),
            RoundSpec::gate(Party::Alice, "cnot", &["x1", "h1"]),
            RoundSpec::gate(Party::Alice, "cnot", &["x2", "h1"]),
            RoundSpec::send(Party::Alice, SendKind::Commit, &["h0", "h1"]),
            RoundSpec::send(Party::Alice, SendKind::Open, &["h0", "h1"]).in_phase(Phase::Open),
            RoundSpec::send(Party::Alice, SendKind::Classical, &["x0", "x1", "x2"]).in_phase(Phase::Open),
        ],
        reveal: Reveal::Transcript(vec![2, 3, 4]),
        c_registers: Vec::new(),
        simulated_from: None,
    }
}

fn parse_from(rest: &str, prefix: &str) -> Option<(usize, usize)> {
    let body = rest.strip_prefix(prefix)?;
    let (a, b) = body.split_once("_from_")?;
    Some((a.parse().ok()?, b.parse().ok()?))
}

/// Looks up a reference protocol by name.
///
/// Accepted: `trivial_{l}_from_{l}`, `superdense_{2n}_from_{n}`, `naive_angle_qubit`,
/// `naive_angle_qubit@{θ}` and `hashed_compression`.
pub fn builtin(name: &str) -> Result<ProtocolIR, ProtocolError> {
    let unknown = || ProtocolError::UnknownBuiltin(name.to_string());
    let p = if let Some((l, m)) = parse_from(name, "trivial_") {
        if l != m || l == 0 {
            return Err(unknown());
        }
        trivial(l)
    } else if let Some((l, n)) = parse_from(name, "superdense_") {
        if l != 2 * n || n == 0 {
            return Err(unknown());
        }
        superdense(n)
    } else if name == "naive_angle_qubit" {
        naive_angle(DEFAULT_ANGLE)
    } else if let Some(t) = name.strip_prefix("naive_angle_qubit@") {
        let theta: f64 = t.parse().map_err(|_| unknown())?;
        if !theta.is_finite() {
            return Err(unknown());
        }
        naive_angle(theta)
    } else if name == "hashed_compression" {
        hashed_compression()
    } else {
        return Err(unknown());
    };
    p.validate()
}
