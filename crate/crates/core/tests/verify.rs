use monadic_sdp::examples::{climate_spec, scheduling_spec, stochastic_climate_spec};
use monadic_sdp::measures::{MEAS_JOIN, MEAS_PLUS, MEAS_PURE};
use monadic_sdp::sdp::ValidSpec;
use monadic_sdp::value::Value;
use monadic_sdp::verify::*;

const BUDGET: u64 = 100_000;

fn climate(measure: &str) -> ValidSpec {
    climate_spec(measure).unwrap().into_valid().unwrap()
}

const ORDER: [&str; 13] = [
    CHECK_MONAD_LAWS,
    CHECK_NONEMPTY,
    CHECK_PREORDER,
    CHECK_PLUS_MON,
    "measPureSpec",
    "measJoinSpec",
    "measPlusSpec",
    "measMonSpec",
    CHECK_TRJ_NOT_EMPTY,
    CHECK_EQUIVALENCE,
    CHECK_OPT_VAL,
    CHECK_OPT_VAL_PRIME,
    CHECK_BELLMAN,
];

#[test]
fn climate_min_is_certified() {
    let r = run_verification(&climate("min"), 0, 3, BUDGET, 0).unwrap();
    let names: Vec<&str> = r.checks.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ORDER);
    assert!(r.failed_checks().is_empty(), "{:?}", r.failed_checks());
    assert!(r.certified && r.conditions_passed && !r.harness_defect);
    assert_eq!(r.value_grid, (0..=3).map(Value::Int).collect::<Vec<_>>());
}

#[test]
fn climate_sum_is_not_certified() {
    let r = run_verification(&climate("sum"), 0, 3, BUDGET, 0).unwrap();
    assert!(!r.certified);
    assert_eq!(r.status(MEAS_PLUS), Some(CheckStatus::Fail));
    assert_eq!(r.status(MEAS_PURE), Some(CheckStatus::Pass));
    assert_eq!(r.status(MEAS_JOIN), Some(CheckStatus::Pass));
    assert_eq!(r.status(CHECK_EQUIVALENCE), Some(CheckStatus::Fail));
    assert_eq!(r.status(CHECK_OPT_VAL), Some(CheckStatus::Pass));
    assert_eq!(r.status(CHECK_OPT_VAL_PRIME), Some(CheckStatus::Fail));
    assert!(!r.harness_defect);
    let eq = r.check(CHECK_EQUIVALENCE).unwrap().oracle.as_ref().unwrap();
    assert!(eq
        .witnesses
        .iter()
        .any(|w| w.state == "Good" && w.left == Value::Int(13) && w.right == Value::Int(21)));
    assert!(r.check(MEAS_PLUS).unwrap().counter_example().is_some());
    assert!(r.verdict.starts_with("not certified"), "{}", r.verdict);
}

#[test]
fn scheduling_and_stochastic_climate_are_certified() {
    let sched = scheduling_spec().into_valid().unwrap();
    let r = run_verification(&sched, 0, 3, BUDGET, 0).unwrap();
    assert!(r.certified, "{:?}", r.failed_checks());
    let stoch = stochastic_climate_spec().into_valid().unwrap();
    let r = run_verification(&stoch, 0, 3, BUDGET, 0).unwrap();
    assert!(r.certified, "{:?}", r.failed_checks());
}

#[test]
fn over_cap_oracles_are_skipped_and_block_certification() {
    let spec = climate("min");
    let mut cfg = VerifyConfig::new(BUDGET, 0);
    cfg.enumeration_cap = 8;
    let r = run_verification_with(&spec, 0, 3, &cfg).unwrap();
    assert_eq!(r.status(CHECK_OPT_VAL), Some(CheckStatus::Skipped));
    assert!(r
        .check(CHECK_OPT_VAL)
        .unwrap()
        .reason
        .as_ref()
        .unwrap()
        .contains("64"));
    assert!(!r.certified);
    assert!(r.verdict.contains("skipped"));
}

#[test]
fn reports_are_deterministic() {
    let spec = climate("sum");
    let a = run_verification(&spec, 0, 2, 50, 7).unwrap();
    let b = run_verification(&spec, 0, 2, 50, 7).unwrap();
    assert_eq!(a, b);
}

#[test]
fn out_of_range_requests_are_errors() {
    assert!(run_verification(&climate("min"), 2, 3, BUDGET, 0).is_err());
}
