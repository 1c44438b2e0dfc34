//! Seeded randomized checks of the inequalities and identities the bounds rest on.
//!
//! Every instance draws from its own ChaCha stream, `(seed, lemma index, instance)`,
//! so results do not depend on the thread count or scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::attack::uhlmann_unitary;
use crate::entropy::{
    check_classical_chain_rule, check_measurement_bound, check_quantum_chain_rule, guessing_probability,
    helstrom_guessing_probability, min_entropy, min_entropy_cq,
};
use crate::hashing::{
    best_hash, build_toeplitz_family, family_distance_from_uniform, good_hash_bound, leftover_hash_bound,
};
use crate::linalg::{DensityOperator, PureState, RegisterSpace};
use crate::metrics::{cq_mixture_distance, fidelity, hiding_implies_close, purified_distance, trace_distance, CQState};
use crate::policy::policy;
use crate::random::{haar_unitary, random_density, random_pure};
use crate::scalar::c;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma {
    /// `1 − F ≤ D ≤ √(1 − F²)`
    FuchsVanDeGraaf,
    /// `D ≤ P ≤ √(2D)`
    PurifiedDistance,
    /// `D(ρ_XB, σ_XB) = Σ_x P(x) D(ρ_x, σ_x)` for a shared distribution of X.
    CqMixtureIdentity,
    /// `D(ρ⁰, ρ¹) ≤ 2 d_unif` for a uniform bit.
    HidingImpliesClose,
    /// Solver guessing probability against `½ + ½‖P(0)ρ⁰ − P(1)ρ¹‖₁`.
    HelstromGuessing,
    /// Maximally entangled pairs and uniform strings.
    MinEntropyReferences,
    ClassicalChainRule,
    MeasurementBound,
    QuantumChainRule,
    /// Family average of the distance from uniform against `½√(2^{1−H})`.
    LeftoverHash,
    /// Best balanced split against twice the leftover-hash bound.
    GoodHash,
    /// Overlap of the constructed unitary against the marginal fidelity.
    UhlmannFidelity,
    /// `√(1 − |⟨ψ₁|U|ψ₀⟩|²) ≤ √(2ε)`
    UhlmannDistance,
}

/// Maximally entangled `d = 2, 3, 4`, then uniform strings of length 1 to 4.
const REFERENCE_CASES: usize = 7;

impl Lemma {
    pub const ALL: [Lemma; 13] = [
        Lemma::FuchsVanDeGraaf,
        Lemma::PurifiedDistance,
        Lemma::CqMixtureIdentity,
        Lemma::HidingImpliesClose,
        Lemma::HelstromGuessing,
        Lemma::MinEntropyReferences,
        Lemma::ClassicalChainRule,
        Lemma::MeasurementBound,
        Lemma::QuantumChainRule,
        Lemma::LeftoverHash,
        Lemma::GoodHash,
        Lemma::UhlmannFidelity,
        Lemma::UhlmannDistance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::FuchsVanDeGraaf => "fuchs_van_de_graaf",
            Lemma::PurifiedDistance => "purified_distance",
            Lemma::CqMixtureIdentity => "cq_mixture_identity",
            Lemma::HidingImpliesClose => "hiding_implies_close",
            Lemma::HelstromGuessing => "helstrom_guessing",
            Lemma::MinEntropyReferences => "min_entropy_references",
            Lemma::ClassicalChainRule => "classical_chain_rule",
            Lemma::MeasurementBound => "measurement_bound",
            Lemma::QuantumChainRule => "quantum_chain_rule",
            Lemma::LeftoverHash => "leftover_hash",
            Lemma::GoodHash => "good_hash",
            Lemma::UhlmannFidelity => "uhlmann_fidelity",
            Lemma::UhlmannDistance => "uhlmann_distance",
        }
    }

    pub fn module(self) -> &'static str {
        match self {
            Lemma::FuchsVanDeGraaf | Lemma::PurifiedDistance | Lemma::CqMixtureIdentity | Lemma::HidingImpliesClose => {
                "metrics"
            }
            Lemma::HelstromGuessing
            | Lemma::MinEntropyReferences
            | Lemma::ClassicalChainRule
            | Lemma::MeasurementBound
            | Lemma::QuantumChainRule => "entropy",
            Lemma::LeftoverHash | Lemma::GoodHash => "hashing",
            Lemma::UhlmannFidelity | Lemma::UhlmannDistance => "attack",
        }
    }

    pub fn default_instances(self) -> usize {
        match self {
            Lemma::FuchsVanDeGraaf | Lemma::PurifiedDistance | Lemma::CqMixtureIdentity => 500,
            Lemma::HidingImpliesClose => 200,
            Lemma::ClassicalChainRule | Lemma::MeasurementBound | Lemma::QuantumChainRule => 200,
            Lemma::MinEntropyReferences => REFERENCE_CASES,
            _ => 100,
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Lemma::FuchsVanDeGraaf | Lemma::PurifiedDistance | Lemma::CqMixtureIdentity | Lemma::HidingImpliesClose => {
                1e-9
            }
            Lemma::HelstromGuessing | Lemma::MinEntropyReferences => 1e-6,
            Lemma::UhlmannFidelity => 1e-8,
            _ => 1e-7,
        }
    }

    fn index(self) -> u64 {
        Lemma::ALL.iter().position(|&l| l == self).expect("listed") as u64
    }

    /// Slack of instance `i`; negative means the inequality failed by that much.
    fn instance(self, rng: &mut ChaCha8Rng, i: usize) -> Result<f64, String> {
        match self {
            Lemma::FuchsVanDeGraaf => {
                let (r, s) = density_pair(rng)?;
                let d = trace_distance(&r, &s).map_err(str)?;
                let f = fidelity(&r, &s).map_err(str)?;
                Ok((d - (1.0 - f)).min((1.0 - f * f).max(0.0).sqrt() - d))
            }
            Lemma::PurifiedDistance => {
                let (r, s) = density_pair(rng)?;
                let d = trace_distance(&r, &s).map_err(str)?;
                let p = purified_distance(&r, &s).map_err(str)?;
                Ok(((2.0 * d).sqrt() - p).min(p - d))
            }
            Lemma::CqMixtureIdentity => {
                let ell = rng.random_range(1..=2);
                let db = rng.random_range(2..=3);
                let n = 1usize << ell;
                let w = random_weights(rng, n);
                let ra: Vec<_> = (0..n).map(|_| random_state(rng, "b", db)).collect::<Result<_, _>>()?;
                let rb: Vec<_> = (0..n).map(|_| random_state(rng, "b", db)).collect::<Result<_, _>>()?;
                let direct: f64 = (0..n).map(|x| Ok(w[x] * trace_distance(&ra[x], &rb[x])?)).sum::<Result<f64, crate::metrics::MetricsError>>().map_err(str)?;
                let a = CQState::new(ell, (0..n).collect(), w.clone(), ra).map_err(str)?;
                let b = CQState::new(ell, (0..n).collect(), w, rb).map_err(str)?;
                let blocks = cq_mixture_distance(&a, &b).map_err(str)?;
                let embedded =
                    trace_distance(&a.to_density("x").map_err(str)?, &b.to_density("x").map_err(str)?).map_err(str)?;
                Ok(-(blocks - direct).abs().max((blocks - embedded).abs()))
            }
            Lemma::HidingImpliesClose => {
                let db = rng.random_range(2..=4);
                let conds = vec![random_state(rng, "b", db)?, random_state(rng, "b", db)?];
                let (d_unif, dist) = hiding_implies_close(&CQState::uniform(1, conds).map_err(str)?).map_err(str)?;
                Ok(2.0 * d_unif - dist)
            }
            Lemma::HelstromGuessing => {
                let db = rng.random_range(2..=4);
                let w = random_weights(rng, 2);
                let conds = vec![random_state(rng, "b", db)?, random_state(rng, "b", db)?];
                let rho = CQState::new(1, vec![0, 1], w, conds).map_err(str)?;
                let sdp = guessing_probability(&rho).map_err(str)?;
                let closed = helstrom_guessing_probability(&rho).map_err(str)?;
                Ok(-(sdp - closed).abs())
            }
            Lemma::MinEntropyReferences => reference_case(i),
            Lemma::ClassicalChainRule => {
                let (dx, dz) = (rng.random_range(2..=3), rng.random_range(2..=3));
                // every fourth instance copies a uniform X into Z with B independent: equality
                let tight = i.is_multiple_of(4);
                let dz = if tight { dx } else { dz };
                let space = RegisterSpace::new(&[("x", dx), ("b", 2)]).map_err(str)?;
                let zsp = RegisterSpace::single("z", dz).map_err(str)?;
                let w = if tight { vec![1.0 / dz as f64; dz] } else { random_weights(rng, dz) };
                let b = random_state(rng, "b", 2)?;
                let full = space.merge(&zsp).map_err(str)?;
                let d = full.total_dim();
                let mut acc = crate::linalg::CMatrix::zeros(d, d);
                for (z, &wz) in w.iter().enumerate() {
                    let xb = if tight {
                        DensityOperator::basis(RegisterSpace::single("x", dx).map_err(str)?, z)
                            .and_then(|x| x.tensor(&b))
                            .map_err(str)?
                    } else {
                        random_state_on(rng, &space)?
                    };
                    let term = xb.tensor(&DensityOperator::basis(zsp.clone(), z).map_err(str)?).map_err(str)?;
                    acc = &acc + &term.matrix().scale_real(wz);
                }
                let rho = DensityOperator::new(full, acc).map_err(str)?;
                Ok(check_classical_chain_rule(&rho, &["b"], "z").map_err(str)?.slack)
            }
            Lemma::MeasurementBound => {
                let (rho, dc) = xbc_state(rng, i)?;
                let basis = haar_unitary::<f64>(rng, dc);
                Ok(check_measurement_bound(&rho, &["b"], "c", &basis).map_err(str)?.slack)
            }
            Lemma::QuantumChainRule => {
                let (rho, _) = xbc_state(rng, i)?;
                Ok(check_quantum_chain_rule(&rho, &["b"], "c").map_err(str)?.slack)
            }
            Lemma::LeftoverHash | Lemma::GoodHash => {
                let db = rng.random_range(2..=3);
                let conds: Vec<_> = (0..8).map(|_| random_state(rng, "b", db)).collect::<Result<_, _>>()?;
                let rho = CQState::uniform(3, conds).map_err(str)?;
                let h = min_entropy_cq(&rho).map_err(str)?.lambda;
                if self == Lemma::LeftoverHash {
                    let family = build_toeplitz_family(3).map_err(str)?;
                    let d = family_distance_from_uniform(&rho, &family).map_err(str)?;
                    Ok(leftover_hash_bound(0.0, h) - d)
                } else {
                    Ok(good_hash_bound(0.0, h) - best_hash(&rho).map_err(str)?.distance)
                }
            }
            Lemma::UhlmannFidelity | Lemma::UhlmannDistance => {
                let (da, db) = (rng.random_range(2..=4), rng.random_range(2..=4));
                let space = RegisterSpace::new(&[("a", da), ("b", db)]).map_err(str)?;
                let p0 = PureState::new(space.clone(), random_pure::<f64>(rng, da * db)).map_err(str)?;
                let p1 = PureState::new(space, random_pure::<f64>(rng, da * db)).map_err(str)?;
                let u = uhlmann_unitary(&p0, &p1, &["a"]).map_err(str)?;
                let (b0, b1) = (p0.reduced(&["b"]).map_err(str)?, p1.reduced(&["b"]).map_err(str)?);
                if self == Lemma::UhlmannFidelity {
                    let moved = p0.apply_isometry(&u.unitary, &["a"], &[]).map_err(str)?;
                    let achieved = moved.overlap(&p1).map_err(str)?.norm();
                    let f = fidelity(&b0, &b1).map_err(str)?;
                    Ok(-(u.overlap - f).abs().max((achieved - f).abs()))
                } else {
                    let eps = trace_distance(&b0, &b1).map_err(str)?;
                    let dist = (1.0 - u.overlap * u.overlap).max(0.0).sqrt();
                    Ok((2.0 * eps).sqrt() - dist)
                }
            }
        }
    }
}

fn str(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

fn random_state_on(rng: &mut ChaCha8Rng, space: &RegisterSpace) -> Result<DensityOperator<f64>, String> {
    let d = space.total_dim();
    let rank = rng.random_range(1..=d);
    DensityOperator::new(space.clone(), random_density(rng, d, rank)).map_err(str)
}

fn random_state(rng: &mut ChaCha8Rng, label: &str, dim: usize) -> Result<DensityOperator<f64>, String> {
    random_state_on(rng, &RegisterSpace::single(label, dim).map_err(str)?)
}

fn density_pair(rng: &mut ChaCha8Rng) -> Result<(DensityOperator<f64>, DensityOperator<f64>), String> {
    let d = rng.random_range(2..=4);
    Ok((random_state(rng, "a", d)?, random_state(rng, "a", d)?))
}

/// A random state on `x, b, c`, or for every fourth instance a maximally entangled
/// `xc` pair next to a random `b`, where both inequalities on `c` are tight.
fn xbc_state(rng: &mut ChaCha8Rng, i: usize) -> Result<(DensityOperator<f64>, usize), String> {
    let (dx, dc) = (rng.random_range(2..=3), rng.random_range(2..=3));
    if !i.is_multiple_of(4) {
        let space = RegisterSpace::new(&[("x", dx), ("b", 2), ("c", dc)]).map_err(str)?;
        return Ok((random_state_on(rng, &space)?, dc));
    }
    let b = random_state(rng, "b", 2)?;
    let rho = maximally_entangled("x", "c", dc)?.tensor(&b).and_then(|r| r.permute(&["x", "b", "c"])).map_err(str)?;
    Ok((rho, dc))
}

fn maximally_entangled(a: &str, b: &str, d: usize) -> Result<DensityOperator<f64>, String> {
    let space = RegisterSpace::new(&[(a, d), (b, d)]).map_err(str)?;
    let amp = c(1.0 / (d as f64).sqrt(), 0.0);
    let amps = (0..d * d).map(|k| if k / d == k % d { amp } else { c(0.0, 0.0) }).collect();
    DensityOperator::from_pure(&PureState::new(space, amps).map_err(str)?).map_err(str)
}

fn reference_case(i: usize) -> Result<f64, String> {
    if i < 3 {
        let d = i + 2;
        let rho = maximally_entangled("a", "b", d)?;
        let h = min_entropy(&rho, &["b"]).map_err(str)?.lambda;
        Ok(-(h + (d as f64).log2()).abs())
    } else {
        let ell = i - 2;
        let n = 1usize << ell;
        let space = RegisterSpace::single("x", n).map_err(str)?;
        let rho = DensityOperator::classical(space, &vec![1.0 / n as f64; n]).map_err(str)?;
        let h = min_entropy::<f64, &str>(&rho, &[]).map_err(str)?.lambda;
        Ok(-(h - ell as f64).abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    /// Missed the tolerance but stayed within the numerical noise ceiling.
    Tolerance,
    Logic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub instance: usize,
    pub slack: f64,
    pub kind: FailureKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub lemma: Lemma,
    pub module: &'static str,
    pub instances: usize,
    pub passed: usize,
    pub tolerance: f64,
    /// Smallest slack over the instances that ran.
    pub worst_slack: f64,
    pub worst_instance: usize,
    pub tolerance_failures: usize,
    pub logic_failures: usize,
    /// Instances that could not be evaluated, e.g. solver non-convergence.
    pub errors: usize,
    /// Up to five failures, lowest instance first.
    pub failures: Vec<Failure>,
    pub first_error: Option<String>,
}

impl LemmaReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.instances
    }
}

#[derive(Debug, Clone, Default)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Replaces every lemma's own tolerance.
    pub tolerance: Option<f64>,
    /// Replaces every lemma's instance count, except the fixed reference cases.
    pub instances: Option<usize>,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub lemmas: Vec<LemmaReport>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.lemmas.iter().all(LemmaReport::all_passed)
    }

    pub fn has_errors(&self) -> bool {
        self.lemmas.iter().any(|l| l.errors > 0)
    }

    pub fn get(&self, lemma: Lemma) -> Option<&LemmaReport> {
        self.lemmas.iter().find(|l| l.lemma == lemma)
    }
}

fn instance_rng(seed: u64, lemma: Lemma, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((lemma.index() << 32) | i as u64);
    rng
}

pub fn run_lemma(lemma: Lemma, seed: u64, instances: usize, tolerance: f64) -> LemmaReport {
    let instances = if lemma == Lemma::MinEntropyReferences { REFERENCE_CASES } else { instances };
    let results: Vec<Result<f64, String>> = (0..instances)
        .into_par_iter()
        .map(|i| lemma.instance(&mut instance_rng(seed, lemma, i), i))
        .collect();
    let ceiling = policy::<f64>().noise_ceiling.max(tolerance);
    let mut report = LemmaReport {
        lemma,
        module: lemma.module(),
        instances,
        passed: 0,
        tolerance,
        worst_slack: f64::INFINITY,
        worst_instance: 0,
        tolerance_failures: 0,
        logic_failures: 0,
        errors: 0,
        failures: Vec::new(),
        first_error: None,
    };
    for (i, r) in results.into_iter().enumerate() {
        let slack = match r {
            Ok(s) if s.is_nan() => {
                report.errors += 1;
                report.first_error.get_or_insert_with(|| format!("instance {i}: NaN slack"));
                continue;
            }
            Ok(s) => s,
            Err(e) => {
                report.errors += 1;
                report.first_error.get_or_insert_with(|| format!("instance {i}: {e}"));
                continue;
            }
        };
        if slack < report.worst_slack {
            report.worst_slack = slack;
            report.worst_instance = i;
        }
        if slack >= -tolerance {
            report.passed += 1;
            continue;
        }
        let kind = if slack >= -ceiling { FailureKind::Tolerance } else { FailureKind::Logic };
        match kind {
            FailureKind::Tolerance => report.tolerance_failures += 1,
            FailureKind::Logic => report.logic_failures += 1,
        }
        if report.failures.len() < 5 {
            report.failures.push(Failure { instance: i, slack, kind });
        }
    }
    if !report.worst_slack.is_finite() {
        report.worst_slack = 0.0;
    }
    report
}

fn run_all(config: &SuiteConfig) -> SuiteReport {
    let lemmas = Lemma::ALL
        .iter()
        .map(|&l| {
            let n = config.instances.unwrap_or_else(|| l.default_instances());
            run_lemma(l, config.seed, n, config.tolerance.unwrap_or_else(|| l.default_tolerance()))
        })
        .collect();
    SuiteReport { seed: config.seed, lemmas }
}

/// Runs every lemma in [`Lemma::ALL`] order.
pub fn run_suites(config: &SuiteConfig) -> Result<SuiteReport, rayon::ThreadPoolBuildError> {
    match config.jobs {
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build()?;
            Ok(pool.install(|| run_all(config)))
        }
        None => Ok(run_all(config)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_independent_of_order() {
        let a = run_lemma(Lemma::FuchsVanDeGraaf, 5, 20, 1e-9);
        let b = run_lemma(Lemma::FuchsVanDeGraaf, 5, 40, 1e-9);
        assert!(a.worst_slack >= b.worst_slack);
        let c = run_lemma(Lemma::FuchsVanDeGraaf, 5, 20, 1e-9);
        assert_eq!(a, c);
    }

    #[test]
    fn references_are_fixed() {
        let r = run_lemma(Lemma::MinEntropyReferences, 0, 1000, 1e-6);
        assert_eq!(r.instances, REFERENCE_CASES);
        assert!(r.all_passed(), "{r:?}");
    }

    #[test]
    fn tight_tolerance_failures_are_not_logic() {
        let r = run_lemma(Lemma::CqMixtureIdentity, 1, 50, 0.0);
        assert_eq!(r.logic_failures, 0);
        assert_eq!(r.passed + r.tolerance_failures, r.instances);
    }
}
