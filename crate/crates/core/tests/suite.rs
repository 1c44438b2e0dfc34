use commitlab::suite::*;

#[test]
fn default_suite_passes() {
    let r = run_suites(&SuiteConfig { seed: 42, ..Default::default() }).unwrap();
    for l in &r.lemmas {
        assert!(l.all_passed(), "{l:?}");
        assert_eq!(l.instances, l.lemma.default_instances());
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let cfg = |jobs| SuiteConfig { seed: 7, instances: Some(6), jobs: Some(jobs), ..Default::default() };
    assert_eq!(run_suites(&cfg(1)).unwrap(), run_suites(&cfg(4)).unwrap());
}

#[test]
fn seeds_differ() {
    let a = run_lemma(Lemma::PurifiedDistance, 1, 30, 1e-9);
    let b = run_lemma(Lemma::PurifiedDistance, 2, 30, 1e-9);
    assert_ne!(a.worst_slack, b.worst_slack);
}

#[test]
fn tight_tolerance_is_flagged_as_tolerance() {
    let r = run_suites(&SuiteConfig { seed: 42, tolerance: Some(1e-12), instances: Some(20), jobs: None }).unwrap();
    assert!(r.lemmas.iter().all(|l| l.logic_failures == 0), "{r:?}");
    assert!(r.lemmas.iter().any(|l| l.tolerance_failures > 0));
}
