//! Runs every check that backward induction's correctness depends on and
//! aggregates them into one report.

use serde::Serialize;

use crate::algebra::{check_plus_mon, check_total_preorder};
use crate::error::{Error, Result};
use crate::measures::{
    check_conditions, ConditionConfig, MEAS_JOIN, MEAS_MON, MEAS_PLUS, MEAS_PURE,
};
use crate::report::{LawOutcome, LawReport, OracleReport};
use crate::sdp::ValidSpec;
use crate::solver::{
    bi, check_bellman, check_optimality, enumerate_policy_seqs, ValueFn, DEFAULT_ENUMERATION_CAP,
};
use crate::trajectories::{check_val_equivalence, trj};
use crate::uncertainty::{check_monad_laws, check_nonempty_preservation, LawGenerator};
use crate::value::Value;

/// Largest value grid handed to the condition checkers.
pub const MAX_GRID: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub laws: Vec<LawOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
}

impl CheckOutcome {
    fn from_laws(name: &str, report: LawReport) -> Self {
        CheckOutcome {
            name: name.to_string(),
            status: if report.all_passed() {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            reason: None,
            laws: report.outcomes,
            oracle: None,
        }
    }

    fn from_oracle(name: &str, report: OracleReport) -> Self {
        CheckOutcome {
            name: name.to_string(),
            status: if report.passed {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            reason: None,
            laws: Vec::new(),
            oracle: Some(report),
        }
    }

    fn skipped(name: &str, reason: String) -> Self {
        CheckOutcome {
            name: name.to_string(),
            status: CheckStatus::Skipped,
            reason: Some(reason),
            laws: Vec::new(),
            oracle: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    /// First counter-example or witness, rendered for humans.
    pub fn counter_example(&self) -> Option<String> {
        if let Some(ce) = self.laws.iter().find_map(|l| l.counter_example.as_ref()) {
            return Some(ce.clone());
        }
        let w = self.oracle.as_ref()?.first_witness()?;
        Some(match &w.better {
            Some(better) => format!(
                "{} from {}: {} beats {} (by {better})",
                w.policy_seq, w.state, w.left, w.right
            ),
            None => format!(
                "{} from {}: {} vs {}",
                w.policy_seq, w.state, w.left, w.right
            ),
        })
    }
}

pub const CHECK_MONAD_LAWS: &str = "monad_laws";
pub const CHECK_NONEMPTY: &str = "nonempty_preservation";
pub const CHECK_PREORDER: &str = "total_preorder";
pub const CHECK_PLUS_MON: &str = "plusMonSpec";
pub const CHECK_TRJ_NOT_EMPTY: &str = "trj_not_empty";
pub const CHECK_EQUIVALENCE: &str = "val_equivalence";
pub const CHECK_OPT_VAL: &str = "optimality(val)";
pub const CHECK_OPT_VAL_PRIME: &str = "optimality(val_prime)";
pub const CHECK_BELLMAN: &str = "bellman";

/// Checks that must pass, and must not be skipped, for certification.
const REQUIRED: [&str; 6] = [
    MEAS_PURE,
    MEAS_JOIN,
    MEAS_PLUS,
    MEAS_MON,
    CHECK_OPT_VAL,
    CHECK_OPT_VAL_PRIME,
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub spec: String,
    pub uncertainty: String,
    pub measure: String,
    pub carrier: String,
    pub step: usize,
    pub horizon: usize,
    pub budget: u64,
    pub seed: u64,
    pub enumeration_cap: u64,
    /// Values the algebra and condition checks range over.
    pub value_grid: Vec<Value>,
    pub checks: Vec<CheckOutcome>,
    /// The three conditions on the measure all passed.
    pub conditions_passed: bool,
    /// Conditions passed yet val and val' disagree: the harness itself is wrong.
    pub harness_defect: bool,
    pub certified: bool,
    pub verdict: String,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn status(&self, name: &str) -> Option<CheckStatus> {
        self.check(name).map(|c| c.status)
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| c.status == CheckStatus::Fail)
            .map(|c| c.name.as_str())
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub budget: u64,
    pub seed: u64,
    pub enumeration_cap: u128,
    pub laws: LawGenerator,
}

impl VerifyConfig {
    pub fn new(budget: u64, seed: u64) -> Self {
        VerifyConfig {
            budget,
            seed,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            laws: LawGenerator::default(),
        }
    }
}

/// Rewards of steps `t..t+n` together with zero, sorted and thinned to at
/// most [`MAX_GRID`] values (smallest and largest always kept).
pub fn value_grid(spec: &ValidSpec, t: usize, n: usize) -> Result<Vec<Value>> {
    let mut vals = vec![spec.alg.zero.clone()];
    for k in t..t + n {
        for by_control in spec.step(k)?.reward.values() {
            for by_next in by_control.values() {
                vals.extend(by_next.values().cloned());
            }
        }
    }
    vals.sort_by(|a, b| a.num_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    vals.dedup_by(|a, b| a.num_cmp(b) == Some(std::cmp::Ordering::Equal));
    if vals.len() <= MAX_GRID {
        return Ok(vals);
    }
    let last = vals.len() - 1;
    let picked = (0..MAX_GRID)
        .map(|i| vals[i * last / (MAX_GRID - 1)].clone())
        .collect();
    Ok(picked)
}

pub fn run_verification(
    spec: &ValidSpec,
    t: usize,
    n: usize,
    budget: u64,
    seed: u64,
) -> Result<VerificationReport> {
    run_verification_with(spec, t, n, &VerifyConfig::new(budget, seed))
}

fn oracle_or_skip(name: &str, result: Result<OracleReport>) -> Result<CheckOutcome> {
    match result {
        Ok(r) => Ok(CheckOutcome::from_oracle(name, r)),
        Err(e @ Error::CapExceeded { .. }) => Ok(CheckOutcome::skipped(name, e.to_string())),
        Err(e) => Err(e),
    }
}

fn trj_not_empty(spec: &ValidSpec, t: usize, n: usize, cap: u128) -> Result<OracleReport> {
    let mut report = OracleReport::new(CHECK_TRJ_NOT_EMPTY);
    for len in 0..=n {
        for ps in enumerate_policy_seqs(spec, t, len, cap)? {
            report.sequences += 1;
            for x in spec.states(t)? {
                report.pairs += 1;
                let out = trj(spec, &ps, x)?;
                if out.is_empty() || out.values().any(|traj| traj.head() != x) {
                    report.record(crate::report::Witness {
                        policy_seq: ps.to_string(),
                        state: x.clone(),
                        left: Value::Int(out.len() as i64),
                        right: Value::Int(0),
                        better: None,
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Runs every check in a fixed order; nothing short-circuits.
pub fn run_verification_with(
    spec: &ValidSpec,
    t: usize,
    n: usize,
    cfg: &VerifyConfig,
) -> Result<VerificationReport> {
    spec.check_range(t, n)?;
    let (budget, seed, cap) = (cfg.budget, cfg.seed, cfg.enumeration_cap);
    let grid = value_grid(spec, t, n)?;
    let mut checks = vec![
        CheckOutcome::from_laws(
            CHECK_MONAD_LAWS,
            check_monad_laws(spec.kind, &cfg.laws, budget, seed)?,
        ),
        CheckOutcome::from_laws(
            CHECK_NONEMPTY,
            check_nonempty_preservation(spec.kind, &cfg.laws, budget, seed)?,
        ),
        CheckOutcome::from_laws(CHECK_PREORDER, check_total_preorder(&spec.alg, &grid)?),
        CheckOutcome::from_laws(CHECK_PLUS_MON, check_plus_mon(&spec.alg, &grid)?),
    ];
    let conditions = check_conditions(
        &spec.measure,
        &spec.alg,
        &ConditionConfig::new(grid.clone()).with_budget(budget, seed),
    )?;
    for outcome in conditions.outcomes {
        let name = outcome.law.clone();
        checks.push(CheckOutcome::from_laws(
            &name,
            LawReport {
                outcomes: vec![outcome],
            },
        ));
    }
    checks.push(oracle_or_skip(
        CHECK_TRJ_NOT_EMPTY,
        trj_not_empty(spec, t, n, cap),
    )?);
    checks.push(oracle_or_skip(
        CHECK_EQUIVALENCE,
        check_val_equivalence(spec, t, n, cap),
    )?);
    let ps = bi(spec, t, n)?;
    checks.push(oracle_or_skip(
        CHECK_OPT_VAL,
        check_optimality(spec, &ps, ValueFn::Val, cap),
    )?);
    checks.push(oracle_or_skip(
        CHECK_OPT_VAL_PRIME,
        check_optimality(spec, &ps, ValueFn::ValPrime, cap),
    )?);
    checks.push(oracle_or_skip(
        CHECK_BELLMAN,
        check_bellman(spec, t, n, cap),
    )?);

    let passed = |name: &str| checks.iter().any(|c| c.name == name && c.passed());
    let conditions_passed = [MEAS_PURE, MEAS_JOIN, MEAS_PLUS].iter().all(|c| passed(c));
    let harness_defect = conditions_passed
        && checks
            .iter()
            .any(|c| c.name == CHECK_EQUIVALENCE && c.status == CheckStatus::Fail);
    let certified =
        REQUIRED.iter().all(|c| passed(c)) && checks.iter().all(|c| c.status != CheckStatus::Fail);
    let verdict = if certified {
        "backward induction certified at desk scale".to_string()
    } else {
        let failed: Vec<&str> = checks
            .iter()
            .filter(|c| c.status == CheckStatus::Fail)
            .map(|c| c.name.as_str())
            .collect();
        let skipped: Vec<&str> = REQUIRED
            .iter()
            .copied()
            .filter(|r| {
                checks
                    .iter()
                    .any(|c| c.name == *r && c.status == CheckStatus::Skipped)
            })
            .collect();
        let mut parts = Vec::new();
        if !failed.is_empty() {
            parts.push(format!("failed: {}", failed.join(", ")));
        }
        if !skipped.is_empty() {
            parts.push(format!("skipped: {}", skipped.join(", ")));
        }
        format!("not certified ({})", parts.join("; "))
    };

    Ok(VerificationReport {
        spec: spec.name.clone(),
        uncertainty: spec.kind.name().to_string(),
        measure: spec.measure.name().to_string(),
        carrier: spec.alg.carrier.name().to_string(),
        step: t,
        horizon: n,
        budget,
        seed,
        enumeration_cap: u64::try_from(cap).unwrap_or(u64::MAX),
        value_grid: grid,
        checks,
        conditions_passed,
        harness_defect,
        certified,
        verdict,
    })
}
