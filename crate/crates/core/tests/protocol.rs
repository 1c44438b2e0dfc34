use commitlab::entropy::min_entropy_cq;
use commitlab::protocol::*;

fn open_success(p: &ProtocolIR) -> f64 {
    honest_open::<f64>(p, Input::Uniform).unwrap().success_probability
}

#[test]
fn builtins_open_correctly() {
    for name in builtin_names() {
        let p = builtin(&name).unwrap();
        assert!((open_success(&p) - 1.0).abs() < 1e-12, "{name}");
        let sim = match p.resources.kind {
            ResourceKind::ClassicalBc => remove_resource(&p).unwrap(),
            ResourceKind::QubitBc => remove_quantum_resource(&p).unwrap(),
            ResourceKind::None => continue,
        };
        assert!((open_success(&sim) - 1.0).abs() < 1e-12, "{name} simulated");
        assert_eq!(sim.n(), p.n());
    }
}

#[test]
fn trivial_copy_lands_with_bob() {
    let p = remove_resource(&builtin("trivial_2_from_2").unwrap()).unwrap();
    assert_eq!(p.c_registers, vec!["C_A0", "C_A1"]);
    let exec = execute_honest::<f64>(&p, Input::Fixed(0b01)).unwrap();
    let view = exec.bob_view(true).unwrap();
    let rho = &view.conditionals()[0];
    assert_eq!(rho.space().labels(), ["C_A0", "C_A1"]);
    assert!((rho.matrix()[(1, 1)].re - 1.0).abs() < 1e-12);
}

#[test]
fn resource_hides_perfectly() {
    for name in ["trivial_3_from_3", "superdense_2_from_1", "superdense_4_from_2", "hashed_compression"] {
        let exec = execute_honest::<f64>(&builtin(name).unwrap(), Input::Uniform).unwrap();
        assert!(measure_hiding(&exec).unwrap() < 1e-9, "{name}");
    }
}

#[test]
fn simulation_preserves_hiding_view() {
    for name in ["trivial_2_from_2", "superdense_2_from_1", "hashed_compression"] {
        let p = builtin(name).unwrap();
        let sim = if p.resources.kind == ResourceKind::QubitBc { remove_quantum_resource(&p) } else { remove_resource(&p) }.unwrap();
        let a = execute_honest::<f64>(&p, Input::Uniform).unwrap();
        let b = execute_honest::<f64>(&sim, Input::Uniform).unwrap();
        assert_eq!(a.bob_view(false).unwrap(), b.bob_view(false).unwrap(), "{name}");
    }
}

#[test]
fn naive_angle_distance_is_cos_theta() {
    for theta in [0.0, 0.3, std::f64::consts::FRAC_PI_4, 1.2, std::f64::consts::FRAC_PI_2] {
        let p = builtin(&format!("naive_angle_qubit@{theta}")).unwrap();
        let exec = execute_honest::<f64>(&p, Input::Uniform).unwrap();
        let eps = measure_hiding(&exec).unwrap();
        assert!((eps - 0.5 * theta.cos()).abs() < 1e-7, "θ={theta}: {eps}");
    }
}

#[test]
fn simulated_entropies() {
    let sd = remove_quantum_resource(&builtin("superdense_2_from_1").unwrap()).unwrap();
    let exec = execute_honest::<f64>(&sd, Input::Uniform).unwrap();
    assert!(min_entropy_cq(&exec.bob_view(true).unwrap()).unwrap().lambda.abs() < 1e-7);
    assert!((min_entropy_cq(&exec.bob_view(false).unwrap()).unwrap().lambda - 2.0).abs() < 1e-7);

    let hc = remove_resource(&builtin("hashed_compression").unwrap()).unwrap();
    let exec = execute_honest::<f64>(&hc, Input::Uniform).unwrap();
    assert!((min_entropy_cq(&exec.bob_view(true).unwrap()).unwrap().lambda - 1.0).abs() < 1e-7);
}

#[test]
fn bob_commitments_keep_branch_count() {
    let text = r#"{
      "name": "bob_coin", "ell": 1,
      "resources": {"kind": "classical_bc", "n_A": 0, "n_B": 1},
      "registers": [{"name": "r", "dim": 2, "owner": "bob"}],
      "rounds": [
        {"actor": "bob", "gate": "h", "on": ["r"], "send": {"kind": "commit", "registers": ["r"]}},
        {"actor": "alice", "phase": "open", "send": {"kind": "classical", "registers": ["x0"]}},
        {"actor": "bob", "phase": "open", "send": {"kind": "open", "registers": ["r"]}}
      ],
      "reveal": {"transcript": [0]}
    }"#;
    let p = load_protocol(text).unwrap();
    let sim = remove_resource(&p).unwrap();
    let a = execute_honest::<f64>(&p, Input::Uniform).unwrap();
    let b = execute_honest::<f64>(&sim, Input::Uniform).unwrap();
    assert_eq!(a.branch_count(), b.branch_count());
    assert_eq!(sim.c_registers, vec!["C_B0"]);
    assert!((open_success(&sim) - 1.0).abs() < 1e-12);
}

#[test]
fn branches_are_pure_and_complete() {
    let exec = execute_honest::<f64>(&builtin("superdense_4_from_2").unwrap(), Input::Uniform).unwrap();
    for run in &exec.runs {
        let total: f64 = run.branches.iter().map(|b| b.probability()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for b in &run.branches {
            let rho = b.state(&exec.space).unwrap().reduced(&["b0", "b1"]).unwrap();
            let purity = rho.matrix().matmul(rho.matrix()).trace().re;
            assert!(purity <= 1.0 + 1e-9);
        }
    }
}

#[test]
fn conditional_gates_follow_transcript() {
    // Alice publishes x0; Bob flips his qubit only when it was 1.
    let text = r#"{
      "name": "echo", "ell": 1, "resources": {"kind": "none"},
      "registers": [{"name": "b", "dim": 2, "owner": "bob"}],
      "rounds": [
        {"actor": "alice", "send": {"kind": "classical", "registers": ["x0"]}},
        {"actor": "bob", "when": "1", "gate": "x", "on": ["b"]}
      ],
      "reveal": {"registers": ["b"]}
    }"#;
    let p = load_protocol(text).unwrap();
    assert!((open_success(&p) - 1.0).abs() < 1e-12);
}

#[test]
fn rejects_wrong_resource_and_bad_names() {
    assert!(matches!(remove_resource(&builtin("superdense_2_from_1").unwrap()), Err(ProtocolError::WrongResource { .. })));
    assert!(matches!(remove_quantum_resource(&builtin("trivial_1_from_1").unwrap()), Err(ProtocolError::WrongResource { .. })));
    assert!(matches!(builtin("trivial_2_from_3"), Err(ProtocolError::UnknownBuiltin(_))));
    assert!(matches!(builtin("superdense_3_from_1"), Err(ProtocolError::UnknownBuiltin(_))));
}

#[test]
fn rho_xabc_for_small_protocol() {
    let exec = execute_honest::<f64>(&builtin("naive_angle_qubit").unwrap(), Input::Uniform).unwrap();
    let rho = exec.rho_xabc().unwrap();
    assert!((rho.trace() - 1.0).abs() < 1e-12);
    assert!(matches!(
        execute_honest::<f64>(&builtin("superdense_4_from_2").unwrap(), Input::Uniform).unwrap().rho_xabc(),
        Err(ProtocolError::Linalg(_))
    ));
}
