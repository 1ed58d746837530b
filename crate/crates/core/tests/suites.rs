use semihilbert::verify::{run_suite, Suite};

fn assert_clean(suite: Suite, seed: u64, count: usize) {
    let report = run_suite(suite, seed, count);
    assert_eq!(report.instances, count);
    assert!(report.passed(), "{suite}: {:#?}", report.failures);
}

#[test]
fn adjoint_suite() {
    assert_clean(Suite::Adjoint, 3, 100);
}

#[test]
fn normal_suite() {
    assert_clean(Suite::Normal, 42, 100);
}

#[test]
fn spectra_suite() {
    assert_clean(Suite::Spectra, 9, 60);
}

#[test]
fn range_suite() {
    assert_clean(Suite::Range, 1, 50);
}

#[test]
fn mapping_suite() {
    assert_clean(Suite::Mapping, 7, 50);
}

#[test]
fn cso_suite() {
    assert_clean(Suite::Cso, 13, 50);
}

#[test]
fn model_suite() {
    assert_clean(Suite::Model, 21, 16);
}

#[test]
fn anderson_suite() {
    assert_clean(Suite::Anderson, 5, 8);
}

#[test]
fn perturb_suite() {
    assert_clean(Suite::Perturb, 17, 30);
}

#[test]
fn failures_replay_from_their_seed() {
    let report = run_suite(Suite::Mapping, 99, 4);
    for i in 0..4 {
        let a = semihilbert::verify::replay(Suite::Mapping, 99, i);
        let b = semihilbert::verify::replay(Suite::Mapping, 99, i);
        assert_eq!(a, b);
    }
    assert_eq!(report.checks[0].passed + report.checks[0].failed, 4);
}
