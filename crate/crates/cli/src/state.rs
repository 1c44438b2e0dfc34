//! State files for the `entropy` command.
//!
//! ```json
//! {
//!   "registers": [{"name": "a", "dim": 2}, {"name": "b", "dim": 2}],
//!   "condition_on": ["b"],
//!   "matrix": [[[0.5, 0], [0, 0], [0, 0], [0.5, 0]], ...]
//! }
//! ```
//! Rows are listed in the computational basis of the registers in declaration order,
//! first register most significant. Entries are `[re, im]`.

use std::path::Path;

use commitlab::linalg::{eig_hermitian, CMatrix, DensityOperator, LinalgError, RegisterSpace};
use commitlab::scalar::C;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegisterEntry {
    name: String,
    dim: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    registers: Vec<RegisterEntry>,
    #[serde(default)]
    condition_on: Vec<String>,
    matrix: Vec<Vec<[f64; 2]>>,
}

pub struct LoadedState {
    pub rho: DensityOperator<f64>,
    pub condition_on: Vec<String>,
}

fn input(path: &Path, msg: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}: {msg}", path.display()))
}

pub fn load_state(path: &Path) -> Result<LoadedState, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| input(path, e))?;
    parse_state(&text).map_err(|e| match e {
        CliError::Input(m) => input(path, m),
        other => other,
    })
}

pub fn parse_state(text: &str) -> Result<LoadedState, CliError> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        let msg = msg.split(" at line").next().unwrap_or(&msg).to_string();
        CliError::Input(format!("line {}, column {}: {msg}", e.line(), e.column()))
    })?;
    let regs: Vec<(&str, usize)> = file.registers.iter().map(|r| (r.name.as_str(), r.dim)).collect();
    let space = RegisterSpace::new(&regs).map_err(|e| CliError::Input(e.to_string()))?;
    let d = space.total_dim();
    if file.matrix.len() != d {
        return Err(CliError::Input(format!("matrix has {} rows, registers need {d}", file.matrix.len())));
    }
    if let Some((i, row)) = file.matrix.iter().enumerate().find(|(_, r)| r.len() != d) {
        return Err(CliError::Input(format!("matrix row {i} has {} entries, expected {d}", row.len())));
    }
    let m = CMatrix::from_fn(d, d, |i, j| {
        let [re, im] = file.matrix[i][j];
        C::new(re, im)
    });
    for label in &file.condition_on {
        if !space.contains(label) {
            return Err(CliError::Input(format!("condition_on names unknown register `{label}`")));
        }
    }
    let rho = DensityOperator::new(space, m.clone()).map_err(|e| match e {
        LinalgError::NotPositive { .. } => {
            let spectrum = eig_hermitian(&m.hermitian_part())
                .map(|eig| eig.values.iter().map(|v| format!("{v:.6e}")).collect::<Vec<_>>().join(", "))
                .unwrap_or_default();
            CliError::Input(format!("{e}; eigenvalues [{spectrum}]"))
        }
        other => CliError::Input(other.to_string()),
    })?;
    Ok(LoadedState { rho, condition_on: file.condition_on })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_pair() {
        let text = r#"{"registers": [{"name": "a", "dim": 2}, {"name": "b", "dim": 2}], "condition_on": ["b"],
          "matrix": [[[0.5,0],[0,0],[0,0],[0.5,0]], [[0,0],[0,0],[0,0],[0,0]], [[0,0],[0,0],[0,0],[0,0]], [[0.5,0],[0,0],[0,0],[0.5,0]]]}"#;
        let s = parse_state(text).unwrap();
        assert_eq!(s.condition_on, ["b"]);
        assert_eq!(s.rho.dim(), 4);
    }

    #[test]
    fn negative_eigenvalue_reported() {
        let text = r#"{"registers": [{"name": "a", "dim": 2}], "matrix": [[[0.5,0],[0.8,0]], [[0.8,0],[0.5,0]]]}"#;
        let Err(CliError::Input(msg)) = parse_state(text) else { panic!() };
        assert!(msg.contains("eigenvalues [1.3"), "{msg}");
    }

    #[test]
    fn syntax_error_has_position() {
        let Err(CliError::Input(msg)) = parse_state("{\n  \"registers\": [\n}") else { panic!() };
        assert!(msg.starts_with("line 3"), "{msg}");
    }
}
