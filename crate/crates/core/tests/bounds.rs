use commitlab::bounds::*;
use commitlab::protocol::{builtin, builtin_names};
use proptest::prelude::*;

/// Independent evaluation of `−2 log₂((1−Δ)²/4 − √(2ε)) − 1`.
fn oracle_penalty(eps: f64, delta: f64) -> f64 {
    let arg = (1.0 - delta).powi(2) * 0.25 - (2.0 * eps).sqrt();
    -2.0 * arg.ln() / std::f64::consts::LN_2 - 1.0
}

#[test]
fn constants_at_one_percent() {
    let c = classical_bound(10, 0.01f64, 0.01).unwrap() - 10.0;
    assert!((c - 5.5414).abs() < 1e-3, "{c}");
    assert!((c - oracle_penalty(0.01, 0.01)).abs() < 1e-12);
    let q = quantum_bound(1, 0.01f64, 0.01).unwrap();
    assert!((q - 7.5414).abs() < 1e-3);
    assert!(q - 2.0 > 5.0 && q - 2.0 < 6.0);
    assert_eq!(classical_bound(3, 0.0f64, 0.0).unwrap(), 6.0);
    assert_eq!(quantum_bound(3, 0.0f64, 0.0).unwrap(), 9.0);
}

#[test]
fn single_precision_agrees() {
    let c = classical_bound(0, 0.01f32, 0.01f32).unwrap();
    assert!((c as f64 - oracle_penalty(0.01, 0.01)).abs() < 1e-4);
}

#[test]
fn monotone_on_grid() {
    let grid: Vec<f64> = (0..50).map(|i| i as f64 / 50.0 * 0.99).collect();
    for &e in &grid {
        let mut prev = f64::NEG_INFINITY;
        for &d in &grid {
            if let Ok(v) = classical_bound(0, e, d) {
                assert!(v >= prev - 1e-12);
                prev = v;
            } else {
                prev = f64::INFINITY;
            }
        }
    }
    for &d in &grid {
        let mut prev = f64::NEG_INFINITY;
        for &e in &grid {
            if let Ok(v) = classical_bound(0, e, d) {
                assert!(v >= prev - 1e-12);
                prev = v;
            } else {
                prev = f64::INFINITY;
            }
        }
    }
}

proptest! {
    #[test]
    fn rhs_matches_oracle_and_margin_consistent(n in 0usize..20, ell in 0usize..40, e in 0.0f64..0.1, d in 0.0f64..0.5) {
        let r = BoundReport::evaluate(BoundKind::Classical, n, ell, e, d).unwrap();
        match r.rhs {
            Some(rhs) => {
                prop_assert!((rhs - n as f64 - oracle_penalty(e, d)).abs() < 1e-9);
                prop_assert_eq!(r.satisfied, r.margin.unwrap() >= 0.0);
            }
            None => prop_assert!(r.satisfied && r.argument <= 0.0),
        }
        let q = BoundReport::evaluate(BoundKind::Quantum, n, ell, e, d).unwrap();
        if let (Some(a), Some(b)) = (q.rhs, r.rhs) {
            prop_assert!((a - b - n as f64).abs() < 1e-9);
        }
    }
}

#[test]
fn gap_trivial_is_tight() {
    let g = entropy_gap_check::<f64>(&builtin("trivial_2_from_2").unwrap()).unwrap();
    assert!((g.h_min_xb - 2.0).abs() < 1e-7);
    assert!(g.h_min_xbc.abs() < 1e-7);
    assert!(g.slack.abs() < 1e-7 && g.holds);
}

#[test]
fn gap_without_resource_is_equality() {
    let g = entropy_gap_check::<f64>(&builtin("naive_angle_qubit").unwrap()).unwrap();
    assert_eq!(g.n, 0);
    assert_eq!(g.log_c, 0.0);
    assert!((g.h_min_xbc - g.h_min_xb).abs() < 1e-9);
}

#[test]
fn gap_superdense_quantum_chain() {
    let g = entropy_gap_check::<f64>(&builtin("superdense_2_from_1").unwrap()).unwrap();
    assert_eq!(g.kind, BoundKind::Quantum);
    assert_eq!(g.log_c, 1.0);
    assert_eq!(g.penalty, 2.0);
    assert!(g.slack >= -1e-7 && g.holds);
}

#[test]
fn no_builtin_violates_its_bound() {
    for name in builtin_names() {
        let v = verify::<f64>(&builtin(&name).unwrap()).unwrap();
        assert!(v.bound.satisfied, "{name}: {:?}", v.bound);
        assert!(v.gap.holds, "{name}");
        assert!(v.certificate.chain_holds, "{name}");
    }
}

#[test]
fn reference_margins() {
    let t = verify::<f64>(&builtin("trivial_2_from_2").unwrap()).unwrap();
    assert!((t.bound.margin.unwrap() - 3.0).abs() < 1e-9);
    let s = verify::<f64>(&builtin("superdense_2_from_1").unwrap()).unwrap();
    assert_eq!(s.bound.kind, BoundKind::Quantum);
    assert!(s.bound.margin.unwrap() >= 3.0 - 1e-9);
    let h = verify::<f64>(&builtin("hashed_compression").unwrap()).unwrap();
    assert!(!h.bound.argument_validity);
}
