//! Two-party commitment protocols: description, honest execution, resource removal.
//!
//! A protocol acts on qubit-like registers owned by Alice or Bob. Alice's input string
//! `x` lives in the automatically declared registers `x0 … x{ℓ−1}` (`x0` is the most
//! significant bit). Each round lets one party apply a gate, optionally conditioned on
//! the classical transcript so far, and then send: measure registers onto the public
//! transcript, hand registers to the other party, or commit/open through the resource.

mod builtin;
mod exec;
mod gates;
mod json;
mod plan;
mod transform;

pub use builtin::{builtin, builtin_names, DEFAULT_ANGLE};
pub use exec::{execute_honest, honest_open, measure_hiding, Branch, ExecutionResult, Input, InputRun, OpenResult};
pub use gates::named_gate;
pub use json::{load_protocol, load_protocol_file};
pub use plan::Owner;
pub use transform::{remove_quantum_resource, remove_resource};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::LinalgError;
use crate::metrics::MetricsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    #[default]
    Commit,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResourceKind {
    ClassicalBc,
    QubitBc,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourceDecl {
    pub kind: ResourceKind,
    /// Bit commitments from Alice to Bob.
    #[serde(rename = "n_A", default)]
    pub n_a: usize,
    /// Bit commitments from Bob to Alice.
    #[serde(rename = "n_B", default)]
    pub n_b: usize,
    /// Qubit commitments.
    #[serde(default)]
    pub n: usize,
}

impl ResourceDecl {
    pub fn none() -> Self {
        ResourceDecl { kind: ResourceKind::None, n_a: 0, n_b: 0, n: 0 }
    }

    pub fn classical(n_a: usize, n_b: usize) -> Self {
        ResourceDecl { kind: ResourceKind::ClassicalBc, n_a, n_b, n: n_a + n_b }
    }

    pub fn qubits(n: usize) -> Self {
        ResourceDecl { kind: ResourceKind::QubitBc, n_a: 0, n_b: 0, n }
    }

    /// The `n` entering the bounds.
    pub fn total(&self) -> usize {
        match self.kind {
            ResourceKind::ClassicalBc => self.n_a + self.n_b,
            ResourceKind::QubitBc => self.n,
            ResourceKind::None => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegisterDecl {
    pub name: String,
    pub dim: usize,
    pub owner: Party,
}

/// A gate by name (`"h"`), a parametrized named gate (`{"name": "ry", "angle": 0.3}`),
/// or an explicit unitary (`{"matrix": [[[re, im], …], …]}`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GateSpec {
    Named(String),
    Parametrized { name: String, angle: f64 },
    Matrix { matrix: Vec<Vec<[f64; 2]>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SendKind {
    None,
    /// Measure in the computational basis and publish the outcome.
    Classical,
    /// Hand the registers to the other party.
    Quantum,
    /// Commit the registers through the resource.
    Commit,
    /// Open earlier commitments of these registers.
    Open,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SendSpec {
    pub kind: SendKind,
    #[serde(default)]
    pub registers: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundSpec {
    pub actor: Party,
    #[serde(default)]
    pub phase: Phase,
    /// Pattern over transcript bits (`0`, `1`, `*`); the gate acts only on matching branches.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub when: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub on: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub send: Option<SendSpec>,
}

impl RoundSpec {
    pub fn gate(actor: Party, gate: &str, on: &[&str]) -> Self {
        RoundSpec {
            actor,
            phase: Phase::Commit,
            when: None,
            gate: Some(GateSpec::Named(gate.to_string())),
            on: on.iter().map(|s| s.to_string()).collect(),
            send: None,
        }
    }

    pub fn send(actor: Party, kind: SendKind, registers: &[&str]) -> Self {
        RoundSpec {
            actor,
            phase: Phase::Commit,
            when: None,
            gate: None,
            on: Vec::new(),
            send: Some(SendSpec { kind, registers: registers.iter().map(|s| s.to_string()).collect() }),
        }
    }

    pub fn in_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_send(mut self, kind: SendKind, registers: &[&str]) -> Self {
        self.send = Some(SendSpec { kind, registers: registers.iter().map(|s| s.to_string()).collect() });
        self
    }

    fn send_kind(&self) -> SendKind {
        self.send.as_ref().map(|s| s.kind).unwrap_or(SendKind::None)
    }
}

/// What Bob reads at the end of the open phase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reveal {
    /// Transcript bit positions, most significant first.
    Transcript(Vec<usize>),
    /// Registers Bob measures, most significant first.
    Registers(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolIR {
    pub name: String,
    pub ell: usize,
    pub resources: ResourceDecl,
    #[serde(default)]
    pub registers: Vec<RegisterDecl>,
    pub rounds: Vec<RoundSpec>,
    pub reveal: Reveal,
    /// Registers holding Bob's simulation of the resource.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub c_registers: Vec<String>,
    /// The resource this protocol was derived from by resource removal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulated_from: Option<ResourceDecl>,
}

impl ProtocolIR {
    /// Resource count for the bounds, looking through a removed resource.
    pub fn n(&self) -> usize {
        self.simulated_from.unwrap_or(self.resources).total()
    }

    /// The resource kind the bounds refer to.
    pub fn bound_kind(&self) -> ResourceKind {
        self.simulated_from.unwrap_or(self.resources).kind
    }

    pub fn input_names(&self) -> Vec<String> {
        (0..self.ell).map(|i| format!("x{i}")).collect()
    }

    /// Checks the protocol, dropping empty rounds.
    pub fn validate(mut self) -> Result<Self, ProtocolError> {
        self.rounds.retain(|r| {
            let idle = match &r.gate {
                None => true,
                Some(GateSpec::Named(n)) => n == "identity",
                _ => false,
            };
            !(idle && r.send_kind() == SendKind::None)
        });
        plan::Plan::build(&self)?;
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{}{path}: {message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Invalid { path: String, line: Option<usize>, message: String },
    #[error("unknown built-in protocol `{0}`")]
    UnknownBuiltin(String),
    #[error("expected a protocol with a {expected} resource, found {found}")]
    WrongResource { expected: &'static str, found: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

impl ProtocolError {
    pub(crate) fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        ProtocolError::Invalid { path: path.into(), line: None, message: message.into() }
    }
}
