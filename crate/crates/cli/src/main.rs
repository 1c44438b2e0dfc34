use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use commitlab::attack::{synthesize, AttackCertificate, AttackError};
use commitlab::bounds::{verify, Verification};
use commitlab::entropy::{min_entropy, EntropyError};
use commitlab::policy::{install, policy, NumericPolicy};
use commitlab::protocol::{builtin, builtin_names, load_protocol_file, ProtocolIR};
use commitlab::suite::{run_suites, SuiteConfig, SuiteReport};
use rayon::prelude::*;
use thiserror::Error;

mod report;
mod state;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Violation(String),
    #[error("{0}")]
    NonConvergence(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Violation(_) => 2,
            CliError::NonConvergence(_) => 3,
        }
    }
}

impl From<AttackError> for CliError {
    fn from(e: AttackError) -> Self {
        if e.is_non_convergence() {
            CliError::NonConvergence(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "commitlab", version, about = "Attacks and length bounds for quantum string commitments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Seed for the randomized suites.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Inequality tolerance; replaces the policy's check threshold or, for
    /// lemma-suite, every lemma's own tolerance.
    #[arg(long, global = true, allow_negative_numbers = true)]
    tol: Option<f64>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct Source {
    /// Protocol description file; may be repeated.
    #[arg(long)]
    protocol: Vec<PathBuf>,
    /// Built-in protocol name, or `all`; may be repeated.
    #[arg(long)]
    builtin: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Measure hiding, attack binding and compare the string length with the bound.
    VerifyBound(Source),
    /// Synthesize the binding attack and print its certificate.
    Attack(Source),
    /// Run the randomized invariant suites.
    LemmaSuite {
        /// Instances per lemma instead of the defaults.
        #[arg(long)]
        instances: Option<usize>,
    },
    /// Conditional min-entropy of a state file.
    Entropy {
        #[arg(long)]
        state: PathBuf,
    },
}

fn load_sources(src: &Source) -> Result<Vec<ProtocolIR>, CliError> {
    let mut out = Vec::new();
    for path in &src.protocol {
        out.push(load_protocol_file(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?);
    }
    for name in &src.builtin {
        if name == "all" {
            for n in builtin_names() {
                out.push(builtin(&n).map_err(|e| CliError::Input(e.to_string()))?);
            }
        } else {
            out.push(builtin(name).map_err(|e| CliError::Input(e.to_string()))?);
        }
    }
    if out.is_empty() {
        return Err(CliError::Input("no protocol given; use --protocol <path> or --builtin <name>".into()));
    }
    Ok(out)
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        b = b.num_threads(j.max(1));
    }
    b.build().map_err(|e| CliError::Input(e.to_string()))
}

type Named<R> = (String, Result<R, CliError>);

/// Runs `f` on every protocol in parallel and keeps the input order.
fn per_protocol<R: Send>(
    protocols: &[ProtocolIR],
    jobs: Option<usize>,
    f: impl Fn(&ProtocolIR) -> Result<R, CliError> + Sync,
) -> Result<Vec<Named<R>>, CliError> {
    let pool = pool(jobs)?;
    Ok(pool.install(|| protocols.par_iter().map(|p| (p.name.clone(), f(p))).collect()))
}

/// Prints diagnostics for failed entries and picks the exit code: input errors
/// first, then violations, then non-convergence.
fn worst<R>(results: &[Named<R>], extra: Option<CliError>) -> u8 {
    let mut codes: Vec<u8> = Vec::new();
    for (name, r) in results {
        if let Err(e) = r {
            eprintln!("{name}: {e}");
            codes.push(e.code());
        }
    }
    if let Some(e) = extra {
        eprintln!("{e}");
        codes.push(e.code());
    }
    [1, 2, 3].into_iter().find(|c| codes.contains(c)).unwrap_or(0)
}

fn violation(v: &Verification) -> Option<String> {
    let mut why = Vec::new();
    if !v.bound.satisfied {
        why.push(format!("ell = {} exceeds the bound {:?}", v.bound.ell, v.bound.rhs));
    }
    if !v.gap.holds {
        why.push(format!("entropy gap slack {:.3e} is negative", v.gap.slack));
    }
    if !v.certificate.chain_holds {
        why.push(format!(
            "achieved distance {} exceeds 2√δ = {}",
            v.certificate.achieved_distance, v.certificate.delta_bound
        ));
    }
    (!why.is_empty()).then(|| why.join("; "))
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let c = &cli.common;
    if let Some(t) = c.tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Input(format!("--tol {t} is not a non-negative number")));
        }
    }
    if !matches!(cli.command, Command::LemmaSuite { .. }) {
        if let Some(t) = c.tol {
            install::<f64>(NumericPolicy { check: t, ..policy::<f64>() });
        }
    }
    let pol = policy::<f64>();
    match &cli.command {
        Command::VerifyBound(src) => {
            let ps = load_sources(src)?;
            let results = per_protocol(&ps, c.jobs, |p| verify::<f64>(p).map_err(CliError::from))?;
            let ok: Vec<&Verification> = results.iter().filter_map(|(_, r)| r.as_ref().ok()).collect();
            report::verification(c.format, &pol, &ok)?;
            let bad = ok
                .iter()
                .filter_map(|v| violation(v).map(|m| format!("{}: {m}", v.certificate.protocol)))
                .collect::<Vec<_>>();
            let extra = (!bad.is_empty())
                .then(|| CliError::Violation(format!("theorem violation flagged, implementation bug: {}", bad.join("; "))));
            Ok(worst(&results, extra))
        }
        Command::Attack(src) => {
            let ps = load_sources(src)?;
            let results = per_protocol(&ps, c.jobs, |p| synthesize::<f64>(p).map_err(CliError::from))?;
            let ok: Vec<&AttackCertificate> = results.iter().filter_map(|(_, r)| r.as_ref().ok()).collect();
            report::attack(c.format, &pol, &ok)?;
            Ok(worst(&results, None))
        }
        Command::LemmaSuite { instances } => {
            let cfg = SuiteConfig { seed: c.seed, tolerance: c.tol, instances: *instances, jobs: c.jobs };
            let r: SuiteReport = run_suites(&cfg).map_err(|e| CliError::Input(e.to_string()))?;
            report::suite(c.format, &pol, &r)?;
            let logic: Vec<&str> = r.lemmas.iter().filter(|l| l.logic_failures > 0).map(|l| l.lemma.name()).collect();
            if !logic.is_empty() {
                return Err(CliError::Violation(format!("logic failures in {}", logic.join(", "))));
            }
            if r.has_errors() {
                let first = r.lemmas.iter().find_map(|l| l.first_error.clone()).unwrap_or_default();
                return Err(CliError::NonConvergence(format!("some instances could not be evaluated: {first}")));
            }
            Ok(0)
        }
        Command::Entropy { state } => {
            let s = state::load_state(state)?;
            let r = min_entropy(&s.rho, &s.condition_on).map_err(|e| match e {
                EntropyError::NonConvergence { .. } => CliError::NonConvergence(e.to_string()),
                other => CliError::Input(other.to_string()),
            })?;
            report::entropy(c.format, &pol, &s, &r)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    // usage errors are input errors; clap's own code 2 is reserved for violations
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
