use commitlab::attack::*;
use commitlab::hashing::BalancedHash;
use commitlab::linalg::{CMatrix, PureState, RegisterSpace};
use commitlab::metrics::{fidelity, trace_distance};
use commitlab::protocol::{builtin, execute_honest, remove_resource, Branch, Input};
use commitlab::random::{haar_unitary, random_pure, rng_from_seed};
use rand::Rng;

fn pair(da: usize, db: usize) -> RegisterSpace {
    RegisterSpace::new(&[("a", da), ("b", db)]).unwrap()
}

fn apply_a(psi: &PureState<f64>, u: &CMatrix<f64>) -> PureState<f64> {
    psi.apply_isometry(u, &["a"], &[]).unwrap()
}

#[test]
fn uhlmann_matches_marginal_fidelity() {
    let mut rng = rng_from_seed(2024);
    for _ in 0..100 {
        let (da, db) = (rng.random_range(2..=4), rng.random_range(2..=4));
        let space = pair(da, db);
        let p0 = PureState::new(space.clone(), random_pure::<f64>(&mut rng, da * db)).unwrap();
        let p1 = PureState::new(space.clone(), random_pure::<f64>(&mut rng, da * db)).unwrap();
        let r = uhlmann_unitary(&p0, &p1, &["a"]).unwrap();
        assert!(r.unitary.isometry_defect() < 1e-9);
        let (b0, b1) = (p0.reduced(&["b"]).unwrap(), p1.reduced(&["b"]).unwrap());
        let fid = fidelity(&b0, &b1).unwrap();
        assert!((r.overlap - fid).abs() < 1e-8, "{} vs {fid}", r.overlap);
        let achieved = apply_a(&p0, &r.unitary).overlap(&p1).unwrap().norm();
        assert!((achieved - r.overlap).abs() < 1e-9);
        let dist = (1.0 - achieved * achieved).max(0.0).sqrt();
        let eps = trace_distance(&b0, &b1).unwrap();
        assert!(dist <= (2.0 * eps).sqrt() + 1e-7);
    }
}

#[test]
fn random_unitaries_never_beat_uhlmann() {
    let mut rng = rng_from_seed(7);
    for _ in 0..5 {
        let space = pair(3, 2);
        let p0 = PureState::new(space.clone(), random_pure::<f64>(&mut rng, 6)).unwrap();
        let p1 = PureState::new(space, random_pure::<f64>(&mut rng, 6)).unwrap();
        let best = uhlmann_unitary(&p0, &p1, &["a"]).unwrap().overlap;
        for _ in 0..200 {
            let u = haar_unitary::<f64>(&mut rng, 3);
            assert!(apply_a(&p0, &u).overlap(&p1).unwrap().norm() <= best + 1e-7);
        }
    }
}

#[test]
fn recovers_local_unitary() {
    let mut rng = rng_from_seed(11);
    let space = pair(3, 3);
    let p0 = PureState::new(space, random_pure::<f64>(&mut rng, 9)).unwrap();
    let v = haar_unitary::<f64>(&mut rng, 3);
    let p1 = apply_a(&p0, &v);
    let r = uhlmann_unitary(&p0, &p1, &["a"]).unwrap();
    assert!((r.overlap - 1.0).abs() < 1e-9);
    // full-rank marginal: U must equal V up to a phase
    let m = r.unitary.adjoint_mul(&v);
    let phase = m[(0, 0)];
    assert!((phase.norm() - 1.0).abs() < 1e-8);
    assert!((&m - &CMatrix::identity(3).scale(phase)).max_abs() < 1e-8);
    assert!((uhlmann_unitary(&p0, &p0, &["a"]).unwrap().overlap - 1.0).abs() < 1e-9);
}

#[test]
fn superposition_marginal_is_preimage_mixture() {
    let p = remove_resource(&builtin("trivial_2_from_2").unwrap()).unwrap();
    let exec = execute_honest::<f64>(&p, Input::Uniform).unwrap();
    let f = BalancedHash::new(2, vec![0, 1, 1, 0]).unwrap();
    for z in 0..2 {
        let s = superposition_from(&exec, &f, z).unwrap();
        assert_eq!(s.alice.last().unwrap(), X_PRIME);
        let b = &s.branches[0];
        assert!((b.probability() - 1.0).abs() < 1e-12);
        let rho = b.state(&s.space).unwrap().reduced(&["C_A0", "C_A1"]).unwrap();
        // oracle: uniform mixture of |x⟩⟨x| over the preimage
        for x in 0..4 {
            let want = if f.eval(x) == z { 0.5 } else { 0.0 };
            assert!((rho.matrix()[(x, x)].re - want).abs() < 1e-12);
        }
        assert!(rho.matrix()[(0, 3)].norm() < 1e-12 && rho.matrix()[(1, 2)].norm() < 1e-12);
    }
    assert!(matches!(
        commit_superposition::<f64>(&builtin("trivial_2_from_2").unwrap(), &f, 0),
        Err(AttackError::ResourceNotRemoved)
    ));
}

#[test]
fn conditioned_attack_basic_cases() {
    let space = pair(2, 2);
    let s = 0.5f64.sqrt();
    let c = |v: f64| num_complex::Complex::new(v, 0.0);
    let fam = |branches: Vec<Branch<f64>>| SuperpositionCommit {
        z: 0,
        target_set: vec![],
        space: space.clone(),
        alice: vec!["a".into()],
        bob: vec!["b".into()],
        branches,
    };
    // two equiprobable transcripts, same state in both families
    let v = vec![c(0.5), c(0.0), c(0.0), c(0.5)];
    let two = || vec![Branch { transcript: vec![0], amplitudes: v.clone() }, Branch { transcript: vec![1], amplitudes: v.clone() }];
    let r = classical_conditioned_attack(&fam(two()), &fam(two())).unwrap();
    assert!(r.distance < 1e-9);
    // single branch reduces to the plain construction
    let a = vec![c(s), c(0.0), c(0.0), c(s)];
    let b = vec![c(1.0), c(0.0), c(0.0), c(0.0)];
    let r = classical_conditioned_attack(
        &fam(vec![Branch { transcript: vec![], amplitudes: a.clone() }]),
        &fam(vec![Branch { transcript: vec![], amplitudes: b.clone() }]),
    )
    .unwrap();
    let plain = uhlmann_unitary(
        &PureState::new(space.clone(), a).unwrap(),
        &PureState::new(space.clone(), b).unwrap(),
        &["a"],
    )
    .unwrap();
    assert!((r.branches[0].overlap - plain.overlap).abs() < 1e-12);
    assert!((r.distance - (1.0 - plain.overlap.powi(2)).sqrt()).abs() < 1e-12);
}

#[test]
fn random_two_branch_instances_respect_lemma() {
    let mut rng = rng_from_seed(99);
    let space = pair(2, 2);
    for _ in 0..20 {
        let mut fams = Vec::new();
        for _ in 0..2 {
            let p: f64 = rng.random_range(0.1..0.9);
            let v0: Vec<_> = random_pure::<f64>(&mut rng, 4).into_iter().map(|z| z * p.sqrt()).collect();
            let v1: Vec<_> = random_pure::<f64>(&mut rng, 4).into_iter().map(|z| z * (1.0 - p).sqrt()).collect();
            fams.push(SuperpositionCommit {
                z: 0,
                target_set: vec![],
                space: space.clone(),
                alice: vec!["a".into()],
                bob: vec!["b".into()],
                branches: vec![Branch { transcript: vec![0], amplitudes: v0 }, Branch { transcript: vec![1], amplitudes: v1 }],
            });
        }
        let r = classical_conditioned_attack(&fams[0], &fams[1]).unwrap();
        // ε from the transcript-and-B marginals, by direct evaluation
        let eps: f64 = (0..2)
            .map(|t| {
                let m = |f: &SuperpositionCommit<f64>| {
                    let b = &f.branches[t];
                    let psi = PureState::from_unnormalized(space.clone(), b.amplitudes.clone()).unwrap();
                    psi.reduced(&["b"]).unwrap().matrix().scale_real(b.probability())
                };
                let d = &m(&fams[0]) - &m(&fams[1]);
                0.5 * commitlab::metrics::hermitian_trace_norm(&d)
            })
            .sum();
        assert!(r.distance <= (2.0 * eps).sqrt() + 1e-7, "{} vs {eps}", r.distance);
    }
}

#[test]
fn trivial_protocols_resist() {
    let mut last = 0.0;
    for n in 1..=3 {
        let c = synthesize::<f64>(&builtin(&format!("trivial_{n}_from_{n}")).unwrap()).unwrap();
        assert!(c.achieved_distance >= 1.0 - 1e-7, "n={n}: {}", c.achieved_distance);
        assert!(c.achieved_distance >= last - 1e-12);
        assert!(c.chain_holds);
        assert!(c.h_min.abs() < 1e-6);
        last = c.achieved_distance;
    }
}

#[test]
fn hashed_compression_is_broken() {
    let c = synthesize::<f64>(&builtin("hashed_compression").unwrap()).unwrap();
    assert!(c.epsilon < 1e-9);
    assert!((c.h_min - 1.0).abs() < 1e-6);
    assert!(c.achieved_distance < 1e-6, "{}", c.achieved_distance);
    assert!(c.implied_binding > 1.0 - 1e-6);
    assert!(c.chain_holds);
    assert!(c.branches.iter().all(|b| b.unitarity_defect < 1e-9));
}

#[test]
fn naive_angle_extremes() {
    let clear = synthesize::<f64>(&builtin("naive_angle_qubit@0").unwrap()).unwrap();
    assert!((clear.achieved_distance - 1.0).abs() < 1e-7);
    let hidden = synthesize::<f64>(&builtin(&format!("naive_angle_qubit@{}", std::f64::consts::FRAC_PI_2)).unwrap()).unwrap();
    assert!(hidden.achieved_distance < 1e-7);
    assert!(hidden.achieved_distance <= 2.0 * (0.5f64 * 1.0).sqrt());
    let mid = synthesize::<f64>(&builtin("naive_angle_qubit").unwrap()).unwrap();
    assert!((mid.achieved_distance - std::f64::consts::FRAC_PI_4.cos()).abs() < 1e-7);
    assert!(mid.chain_holds);
}

#[test]
fn superdense_attack_certificate() {
    let c = synthesize::<f64>(&builtin("superdense_2_from_1").unwrap()).unwrap();
    assert!(c.chain_holds);
    assert_eq!(c.n, 1);
}
