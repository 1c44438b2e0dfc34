//! Named gates over `f64`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::linalg::CMatrix;
use crate::scalar::{c, cr, czero};

fn qubit(entries: [[(f64, f64); 2]; 2]) -> CMatrix<f64> {
    CMatrix::from_fn(2, 2, |i, j| c(entries[i][j].0, entries[i][j].1))
}

fn ry(angle: f64) -> CMatrix<f64> {
    let (s, co) = (angle / 2.0).sin_cos();
    qubit([[(co, 0.0), (-s, 0.0)], [(s, 0.0), (co, 0.0)]])
}

/// `|0⟩⟨0| ⊗ 1 + |1⟩⟨1| ⊗ u` for a qubit control.
fn controlled(u: &CMatrix<f64>) -> CMatrix<f64> {
    let d = u.rows();
    CMatrix::from_fn(2 * d, 2 * d, |i, j| match (i / d, j / d) {
        (0, 0) => if i == j { cr(1.0) } else { czero() },
        (1, 1) => u[(i - d, j - d)],
        _ => czero(),
    })
}

fn permutation(n: usize, f: impl Fn(usize) -> usize) -> CMatrix<f64> {
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        m[(f(j), j)] = cr(1.0);
    }
    m
}

/// Matrix of a named gate acting on registers of dimensions `dims`.
///
/// Qubit gates: `h x y z s t ry` on one qubit, `cnot`/`cx cz swap cry` on two.
/// `copy` maps `|a⟩|b⟩ → |a⟩|b + a mod d_b⟩` on any two registers, `identity` fits anything.
pub fn named_gate(name: &str, angle: Option<f64>, dims: &[usize]) -> Result<CMatrix<f64>, String> {
    let needs_angle = matches!(name, "ry" | "cry");
    match (needs_angle, angle) {
        (true, None) => return Err(format!("gate `{name}` needs an angle")),
        (false, Some(_)) => return Err(format!("gate `{name}` takes no angle")),
        _ => {}
    }
    let arity = |k: usize| -> Result<(), String> {
        if dims.len() != k {
            return Err(format!("gate `{name}` acts on {k} register(s), got {}", dims.len()));
        }
        Ok(())
    };
    let qubits = |k: usize| -> Result<(), String> {
        arity(k)?;
        if dims.iter().any(|&d| d != 2) {
            return Err(format!("gate `{name}` needs qubit registers, got dimensions {dims:?}"));
        }
        Ok(())
    };
    let h = FRAC_1_SQRT_2;
    let one = (1.0, 0.0);
    let zero = (0.0, 0.0);
    Ok(match name {
        "identity" => CMatrix::identity(dims.iter().product()),
        "h" => {
            qubits(1)?;
            qubit([[(h, 0.0), (h, 0.0)], [(h, 0.0), (-h, 0.0)]])
        }
        "x" => {
            qubits(1)?;
            qubit([[zero, one], [one, zero]])
        }
        "y" => {
            qubits(1)?;
            qubit([[zero, (0.0, -1.0)], [(0.0, 1.0), zero]])
        }
        "z" => {
            qubits(1)?;
            qubit([[one, zero], [zero, (-1.0, 0.0)]])
        }
        "s" => {
            qubits(1)?;
            qubit([[one, zero], [zero, (0.0, 1.0)]])
        }
        "t" => {
            qubits(1)?;
            qubit([[one, zero], [zero, (h, h)]])
        }
        "ry" => {
            qubits(1)?;
            ry(angle.unwrap_or_default())
        }
        "cnot" | "cx" => {
            qubits(2)?;
            controlled(&named_gate("x", None, &[2])?)
        }
        "cz" => {
            qubits(2)?;
            controlled(&named_gate("z", None, &[2])?)
        }
        "cry" => {
            qubits(2)?;
            controlled(&ry(angle.unwrap_or_default()))
        }
        "swap" => {
            arity(2)?;
            let (a, b) = (dims[0], dims[1]);
            if a != b {
                return Err(format!("swap needs equal dimensions, got {dims:?}"));
            }
            permutation(a * b, |j| (j % b) * a + j / b)
        }
        "copy" => {
            arity(2)?;
            let db = dims[1];
            permutation(dims[0] * db, |j| {
                let (x, y) = (j / db, j % db);
                x * db + (y + x) % db
            })
        }
        other => return Err(format!("unknown gate `{other}`")),
    })
}
