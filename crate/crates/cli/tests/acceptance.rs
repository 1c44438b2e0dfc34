//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use commitlab::bounds::{classical_bound, quantum_bound, verify, BoundKind};
use commitlab::entropy::min_entropy;
use commitlab::linalg::{DensityOperator, RegisterSpace};
use commitlab::protocol::{builtin, builtin_names, execute_honest, honest_open, measure_hiding, Input};
use commitlab::suite::{run_lemma, Lemma, LemmaReport};

const SEED: u64 = 42;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Runs a lemma at its required count and tolerance; fails on any miss or error.
fn lemma(l: Lemma, instances: usize, tol: f64) -> Result<LemmaReport, String> {
    let r = run_lemma(l, SEED, instances, tol);
    ensure(r.instances == instances, || format!("{}: ran {} of {instances}", l.name(), r.instances))?;
    ensure(r.errors == 0, || format!("{}: {} errors, first {:?}", l.name(), r.errors, r.first_error))?;
    ensure(r.all_passed(), || {
        format!("{}: {}/{} passed, worst slack {:.3e}", l.name(), r.passed, r.instances, r.worst_slack)
    })?;
    Ok(r)
}

fn c1() -> Outcome {
    // ln-based evaluation of −2 log₂((1−Δ)²/4 − √(2ε)) − 1, kept apart from the library
    let oracle = -2.0 * ((0.99f64 * 0.99 / 4.0) - 0.02f64.sqrt()).ln() / std::f64::consts::LN_2 - 1.0;
    let mut worst: f64 = 0.0;
    for n in 0..=64 {
        let v = classical_bound(n, 0.01, 0.01).map_err(|e| e.to_string())? - n as f64;
        worst = worst.max((v - 5.5414).abs());
        ensure((v - oracle).abs() < 1e-12, || format!("n={n}: {v} vs oracle {oracle}"))?;
        ensure(v < 6.0, || format!("n={n}: {v} not below 6"))?;
    }
    ensure(worst <= 1e-3, || format!("deviation from 5.5414 is {worst}"))?;
    Ok(format!("rhs - n = {oracle:.6}"))
}

fn c2() -> Outcome {
    let mut seen = Vec::new();
    for n in 0..=64 {
        let v = quantum_bound(n, 0.01, 0.01).map_err(|e| e.to_string())? - 2.0 * n as f64;
        ensure(v > 5.0 && v < 6.0, || format!("n={n}: {v} outside (5, 6)"))?;
        seen.push(v);
    }
    Ok(format!("rhs - 2n = {:.6}", seen[0]))
}

fn c3() -> Outcome {
    let f = lemma(Lemma::UhlmannFidelity, 100, 1e-8)?;
    let d = lemma(Lemma::UhlmannDistance, 100, 1e-7)?;
    Ok(format!("100 pairs, |overlap - F| <= {:.1e}, min sqrt(2 eps) - dist = {:.3e}", -f.worst_slack, d.worst_slack))
}

fn c4() -> Outcome {
    let h = lemma(Lemma::HelstromGuessing, 100, 1e-6)?;
    let r = lemma(Lemma::MinEntropyReferences, 7, 1e-6)?;
    for ell in 1..=4u32 {
        let n = 1usize << ell;
        let space = RegisterSpace::single("x", n).map_err(|e| e.to_string())?;
        let rho = DensityOperator::classical(space, &vec![1.0 / n as f64; n]).map_err(|e| e.to_string())?;
        let got = min_entropy::<f64, &str>(&rho, &[]).map_err(|e| e.to_string())?.lambda;
        ensure(got == ell as f64, || format!("uniform {ell}-bit string gave {got}"))?;
    }
    Ok(format!(
        "Helstrom max deviation {:.1e}, references max deviation {:.1e}, uniform strings exact",
        -h.worst_slack, -r.worst_slack
    ))
}

fn c5() -> Outcome {
    let mut parts = Vec::new();
    for l in [Lemma::ClassicalChainRule, Lemma::MeasurementBound, Lemma::QuantumChainRule] {
        let r = lemma(l, 200, 1e-7)?;
        parts.push(format!("{} {:.1e}", l.name(), r.worst_slack));
    }
    Ok(format!("200 each, worst slack: {}", parts.join(", ")))
}

fn c6() -> Outcome {
    let a = lemma(Lemma::LeftoverHash, 100, 1e-7)?;
    let b = lemma(Lemma::GoodHash, 100, 1e-7)?;
    Ok(format!("ell = 3, worst slack family {:.3e}, best split {:.3e}", a.worst_slack, b.worst_slack))
}

fn c7() -> Outcome {
    let mut lines = Vec::new();
    for name in ["trivial_1_from_1", "trivial_2_from_2", "trivial_3_from_3", "hashed_compression"] {
        let v = verify::<f64>(&builtin(name).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let c = &v.certificate;
        // δ rebuilt from the measured ε and H_min
        let delta = (2.0 * c.epsilon).sqrt() + 0.5 * (2f64.powf(1.0 - c.h_min)).sqrt();
        ensure((delta - c.delta).abs() < 1e-12, || format!("{name}: δ {} vs recomputed {delta}", c.delta))?;
        ensure(c.achieved_distance <= 2.0 * delta.sqrt() + 1e-7, || {
            format!("{name}: achieved {} > 2√δ = {}", c.achieved_distance, 2.0 * delta.sqrt())
        })?;
        ensure(c.chain_holds, || format!("{name}: chain flag false"))?;
        lines.push(format!("{name} {:.3}<={:.3}", c.achieved_distance, 2.0 * delta.sqrt()));
    }
    for name in builtin_names() {
        let v = verify::<f64>(&builtin(&name).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        if v.bound.kind == BoundKind::Classical {
            ensure(v.bound.satisfied, || format!("{name} violates the classical bound: {:?}", v.bound))?;
        }
    }
    Ok(lines.join(", "))
}

fn c8() -> Outcome {
    let p = builtin("superdense_2_from_1").map_err(|e| e.to_string())?;
    ensure(p.n() == 1 && p.ell == 2, || format!("n = {}, ell = {}", p.n(), p.ell))?;
    let exec = execute_honest::<f64>(&p, Input::Uniform).map_err(|e| e.to_string())?;
    let eps = measure_hiding(&exec).map_err(|e| e.to_string())?;
    ensure(eps.abs() <= 1e-9, || format!("ε = {eps}"))?;
    let open = honest_open::<f64>(&p, Input::Uniform).map_err(|e| e.to_string())?.success_probability;
    ensure((open - 1.0).abs() <= 1e-9, || format!("open succeeds with {open}"))?;
    let v = verify::<f64>(&p).map_err(|e| e.to_string())?;
    ensure(v.bound.kind == BoundKind::Quantum, || "not checked against the quantum bound".into())?;
    let margin = v.bound.margin.ok_or("quantum bound vacuous")?;
    ensure(v.bound.satisfied && margin >= 3.0 - 1e-9, || format!("margin {margin}"))?;
    Ok(format!("eps = {eps:.1e}, open probability {open:.12}, margin {margin:.6}"))
}

fn c9() -> Outcome {
    let mut parts = Vec::new();
    for l in [Lemma::FuchsVanDeGraaf, Lemma::PurifiedDistance, Lemma::CqMixtureIdentity] {
        let r = lemma(l, 500, 1e-9)?;
        parts.push(format!("{} {:.1e}", l.name(), r.worst_slack));
    }
    Ok(format!("500 each, worst slack: {}", parts.join(", ")))
}

fn c10() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_commitlab"))
            .args(["lemma-suite", "--seed", "42", "--format", "json"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.success() && b.status.success(), || {
        format!("exit {:?} / {:?}: {}", a.status.code(), b.status.code(), String::from_utf8_lossy(&a.stderr))
    })?;
    ensure(!a.stdout.is_empty(), || "empty output".into())?;
    ensure(a.stdout == b.stdout, || "outputs differ".into())?;
    Ok(format!("{} identical bytes", a.stdout.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("classical constant", c1, Duration::from_millis(1)),
        ("quantum constant", c2, Duration::from_millis(1)),
        ("Uhlmann suite", c3, Duration::from_secs(10)),
        ("min-entropy solver", c4, Duration::from_secs(60)),
        ("chain rules", c5, Duration::from_secs(300)),
        ("leftover hash", c6, Duration::from_secs(120)),
        ("classical end-to-end chain", c7, Duration::from_secs(120)),
        ("quantum end-to-end chain", c8, Duration::from_secs(30)),
        ("metric identities", c9, Duration::from_secs(60)),
        ("determinism", c10, Duration::MAX),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        let outcome = outcome.and_then(|m| {
            if took <= limit {
                Ok(m)
            } else {
                Err(format!("{m}; took {took:?}, limit {limit:?}"))
            }
        });
        match outcome {
            Ok(m) => println!("PASS  {:>2}  {name}: {m} [{took:.2?}]", i + 1),
            Err(m) => {
                failed += 1;
                println!("FAIL  {:>2}  {name}: {m} [{took:.2?}]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 10 criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
