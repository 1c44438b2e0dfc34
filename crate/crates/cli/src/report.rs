//! Text, JSON and CSV rendering. Nothing here reads clocks or hash-map order, so
//! identical inputs give identical bytes.

use std::fmt::Write as _;
use std::io::Write as _;

use commitlab::attack::AttackCertificate;
use commitlab::bounds::Verification;
use commitlab::entropy::MinEntropyResult;
use commitlab::linalg::CMatrix;
use commitlab::policy::NumericPolicy;
use commitlab::suite::SuiteReport;
use serde::Serialize;

use crate::state::LoadedState;
use crate::{CliError, Format};

fn out_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("cannot write report: {e}"))
}

fn emit_json(value: &impl Serialize) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(out_err)?;
    s.push('\n');
    std::io::stdout().write_all(s.as_bytes()).map_err(out_err)
}

fn emit_csv<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(std::io::stdout());
    for r in rows {
        w.serialize(r).map_err(out_err)?;
    }
    w.flush().map_err(out_err)
}

fn emit_text(s: &str) -> Result<(), CliError> {
    std::io::stdout().write_all(s.as_bytes()).map_err(out_err)
}

fn policy_line(p: &NumericPolicy) -> String {
    format!(
        "policy: check {:e}, noise ceiling {:e}, sdp accept {:e}, validity {:e}, dim cap {}, pure dim cap {}\n",
        p.check, p.noise_ceiling, p.sdp_accept, p.validity, p.dim_cap, p.pure_dim_cap
    )
}

/// Rounds values that would print as `-0.000000000`.
fn z(v: f64) -> f64 {
    if v.abs() < 5e-10 {
        0.0
    } else {
        v
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| format!("{x:.6}"))
}

fn chain_text(s: &mut String, c: &AttackCertificate) {
    let _ = writeln!(s, "== {}  (ell = {}, n = {}, {:?})", c.protocol, c.ell, c.n, c.resource);
    let _ = writeln!(s, "  eps                       {:.9}", z(c.epsilon));
    let _ = writeln!(s, "  eps~ = sqrt(2 eps)        {:.9}", z(c.epsilon_tilde));
    let _ = writeln!(s, "  H_min(X|BC)               {:.9}", z(c.h_min));
    let _ = writeln!(s, "  delta = eps~ + {:.9}  {:.9}", z(c.leftover), z(c.delta));
    let _ = writeln!(s, "  2 sqrt(delta)             {:.9}", z(c.delta_bound));
    let _ = writeln!(s, "  achieved distance         {:.9}", z(c.achieved_distance));
    let _ = writeln!(s, "  Delta >= 1 - distance     {:.9}", z(c.implied_binding));
    let _ = writeln!(s, "  chain holds               {}", c.chain_holds);
    let _ = writeln!(s, "  hash f = {}, z = {}, split distance {:.9}", c.hash, c.z, z(c.split_distance));
}

#[derive(Serialize)]
struct Wrapped<'a, T: Serialize> {
    policy: &'a NumericPolicy,
    #[serde(flatten)]
    body: T,
}

#[derive(Serialize)]
struct VerificationRow<'a> {
    protocol: &'a str,
    ell: usize,
    n: usize,
    kind: String,
    epsilon: f64,
    h_min: f64,
    delta: f64,
    delta_bound: f64,
    achieved_distance: f64,
    implied_binding: f64,
    chain_holds: bool,
    gap_slack: f64,
    gap_holds: bool,
    bound_epsilon: f64,
    bound_delta: f64,
    rhs: Option<f64>,
    margin: Option<f64>,
    satisfied: bool,
    check_tol: f64,
    sdp_accept: f64,
}

pub fn verification(format: Format, pol: &NumericPolicy, reports: &[&Verification]) -> Result<(), CliError> {
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                reports: &'a [&'a Verification],
            }
            emit_json(&Wrapped { policy: pol, body: Body { reports } })
        }
        Format::Csv => emit_csv(reports.iter().map(|v| VerificationRow {
            protocol: &v.certificate.protocol,
            ell: v.bound.ell,
            n: v.bound.n,
            kind: format!("{:?}", v.bound.kind).to_lowercase(),
            epsilon: v.certificate.epsilon,
            h_min: v.certificate.h_min,
            delta: v.certificate.delta,
            delta_bound: v.certificate.delta_bound,
            achieved_distance: v.certificate.achieved_distance,
            implied_binding: v.certificate.implied_binding,
            chain_holds: v.certificate.chain_holds,
            gap_slack: v.gap.slack,
            gap_holds: v.gap.holds,
            bound_epsilon: v.bound.epsilon,
            bound_delta: v.bound.delta,
            rhs: v.bound.rhs,
            margin: v.bound.margin,
            satisfied: v.bound.satisfied,
            check_tol: pol.check,
            sdp_accept: pol.sdp_accept,
        })),
        Format::Text => {
            let mut s = String::new();
            for v in reports {
                chain_text(&mut s, &v.certificate);
                let g = &v.gap;
                let _ = writeln!(
                    s,
                    "  gap: H_min(X|B) {:.9} - penalty {} <= H_min(X|BC) {:.9} (slack {:.3e}, {})",
                    z(g.h_min_xb),
                    g.penalty,
                    z(g.h_min_xbc),
                    g.slack,
                    if g.holds { "holds" } else { "FAILS" }
                );
                let b = &v.bound;
                let _ = writeln!(
                    s,
                    "  {:?} bound at eps = {:.9}, Delta = {:.9}: rhs {}, ell {}, margin {} => {}",
                    b.kind,
                    z(b.epsilon),
                    z(b.delta),
                    opt(b.rhs),
                    b.ell,
                    opt(b.margin),
                    match (b.satisfied, b.argument_validity) {
                        (true, true) => "satisfied",
                        (true, false) => "vacuous",
                        _ => "VIOLATED",
                    }
                );
            }
            s.push_str(&policy_line(pol));
            emit_text(&s)
        }
    }
}

#[derive(Serialize)]
struct BranchRow<'a> {
    protocol: &'a str,
    hash: &'a str,
    transcript: &'a str,
    p0: f64,
    p1: f64,
    overlap: f64,
    distance: f64,
    unitary_dim: usize,
    unitarity_defect: f64,
    achieved_distance: f64,
    delta_bound: f64,
    check_tol: f64,
}

pub fn attack(format: Format, pol: &NumericPolicy, certs: &[&AttackCertificate]) -> Result<(), CliError> {
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                certificates: &'a [&'a AttackCertificate],
            }
            emit_json(&Wrapped { policy: pol, body: Body { certificates: certs } })
        }
        Format::Csv => emit_csv(certs.iter().flat_map(|c| {
            c.branches.iter().map(move |b| BranchRow {
                protocol: &c.protocol,
                hash: &c.hash,
                transcript: &b.transcript,
                p0: b.p0,
                p1: b.p1,
                overlap: b.overlap,
                distance: b.distance,
                unitary_dim: b.unitary_dim,
                unitarity_defect: b.unitarity_defect,
                achieved_distance: c.achieved_distance,
                delta_bound: c.delta_bound,
                check_tol: pol.check,
            })
        })),
        Format::Text => {
            let mut s = String::new();
            for c in certs {
                chain_text(&mut s, c);
                let _ = writeln!(s, "  {:<12} {:>10} {:>10} {:>12} {:>12} {:>6}", "transcript", "p0", "p1", "overlap", "distance", "dim U");
                for b in &c.branches {
                    let t = if b.transcript.is_empty() { "-" } else { &b.transcript };
                    let _ = writeln!(
                        s,
                        "  {:<12} {:>10.6} {:>10.6} {:>12.9} {:>12.9} {:>6}",
                        t, b.p0, b.p1, b.overlap, b.distance, b.unitary_dim
                    );
                }
            }
            s.push_str(&policy_line(pol));
            emit_text(&s)
        }
    }
}

#[derive(Serialize)]
struct LemmaRow<'a> {
    seed: u64,
    lemma: &'a str,
    module: &'a str,
    instances: usize,
    passed: usize,
    tolerance: f64,
    worst_slack: f64,
    worst_instance: usize,
    tolerance_failures: usize,
    logic_failures: usize,
    errors: usize,
    noise_ceiling: f64,
}

pub fn suite(format: Format, pol: &NumericPolicy, r: &SuiteReport) -> Result<(), CliError> {
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                suite: &'a SuiteReport,
            }
            emit_json(&Wrapped { policy: pol, body: Body { suite: r } })
        }
        Format::Csv => emit_csv(r.lemmas.iter().map(|l| LemmaRow {
            seed: r.seed,
            lemma: l.lemma.name(),
            module: l.module,
            instances: l.instances,
            passed: l.passed,
            tolerance: l.tolerance,
            worst_slack: l.worst_slack,
            worst_instance: l.worst_instance,
            tolerance_failures: l.tolerance_failures,
            logic_failures: l.logic_failures,
            errors: l.errors,
            noise_ceiling: pol.noise_ceiling,
        })),
        Format::Text => {
            let mut s = format!("seed {}\n", r.seed);
            let _ = writeln!(
                s,
                "{:<24} {:<8} {:>9} {:>9} {:>13} {:>10} {:>6} {:>6}",
                "lemma", "module", "passed", "tol", "worst slack", "tol fail", "logic", "error"
            );
            for l in &r.lemmas {
                let _ = writeln!(
                    s,
                    "{:<24} {:<8} {:>4}/{:<4} {:>9.0e} {:>13.3e} {:>10} {:>6} {:>6}",
                    l.lemma.name(),
                    l.module,
                    l.passed,
                    l.instances,
                    l.tolerance,
                    l.worst_slack,
                    l.tolerance_failures,
                    l.logic_failures,
                    l.errors
                );
                if let Some(e) = &l.first_error {
                    let _ = writeln!(s, "    {e}");
                }
            }
            let _ = writeln!(s, "{}", if r.all_passed() { "all lemmas passed" } else { "some lemmas failed" });
            s.push_str(&policy_line(pol));
            emit_text(&s)
        }
    }
}

fn pairs(m: &CMatrix<f64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect()).collect()
}

pub fn entropy(format: Format, pol: &NumericPolicy, s: &LoadedState, r: &MinEntropyResult<f64>) -> Result<(), CliError> {
    let labels = s.rho.space().labels();
    let dims = s.rho.space().dims();
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Register<'a> {
                name: &'a str,
                dim: usize,
            }
            #[derive(Serialize)]
            struct Body<'a> {
                registers: Vec<Register<'a>>,
                condition_on: &'a [String],
                entropy: f64,
                entropy_upper: f64,
                feasibility_gap: f64,
                iterations: usize,
                optimal_sigma: Vec<Vec<[f64; 2]>>,
            }
            emit_json(&Wrapped {
                policy: pol,
                body: Body {
                    registers: labels.iter().zip(dims).map(|(name, &dim)| Register { name, dim }).collect(),
                    condition_on: &s.condition_on,
                    entropy: r.lambda,
                    entropy_upper: r.lambda_upper,
                    feasibility_gap: r.feasibility_gap,
                    iterations: r.iterations,
                    optimal_sigma: pairs(r.optimal_sigma.matrix()),
                },
            })
        }
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                entropy: f64,
                entropy_upper: f64,
                feasibility_gap: f64,
                iterations: usize,
                sdp_accept: f64,
            }
            emit_csv([Row {
                entropy: r.lambda,
                entropy_upper: r.lambda_upper,
                feasibility_gap: r.feasibility_gap,
                iterations: r.iterations,
                sdp_accept: pol.sdp_accept,
            }])
        }
        Format::Text => {
            let a: Vec<&str> = labels.iter().filter(|l| !s.condition_on.contains(l)).map(String::as_str).collect();
            let mut t = format!(
                "H_min({}|{}) = {:.9}  (upper {:.9}, gap {:.3e}, {} Newton steps)\n",
                a.join(","),
                s.condition_on.join(","),
                r.lambda,
                r.lambda_upper,
                r.feasibility_gap,
                r.iterations
            );
            t.push_str(&policy_line(pol));
            emit_text(&t)
        }
    }
}
