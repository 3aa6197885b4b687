//! Report types shared by the law, condition and oracle checkers.

use serde::Serialize;

use crate::error::Result;
use crate::space::{Cases, Space};
use crate::value::Value;

/// Result of evaluating one generated case against a law.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Pass,
    /// The law's antecedent does not hold for this case.
    Vacuous,
    Fail(String),
}

impl Verdict {
    pub fn check(ok: bool, counter_example: impl FnOnce() -> String) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail(counter_example())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawOutcome {
    pub law: String,
    pub passed: bool,
    /// Cases where the law was actually exercised (vacuous cases excluded).
    pub cases: u64,
    pub exhaustive: bool,
    pub counter_example: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LawReport {
    pub outcomes: Vec<LawOutcome>,
}

impl LawReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn get(&self, law: &str) -> Option<&LawOutcome> {
        self.outcomes.iter().find(|o| o.law == law)
    }

    pub fn passed(&self, law: &str) -> bool {
        self.get(law).is_some_and(|o| o.passed)
    }

    pub fn failed_laws(&self) -> Vec<&str> {
        self.outcomes
            .iter()
            .filter(|o| !o.passed)
            .map(|o| o.law.as_str())
            .collect()
    }

    pub fn push(&mut self, outcome: LawOutcome) {
        self.outcomes.push(outcome);
    }

    pub fn extend(&mut self, other: LawReport) {
        self.outcomes.extend(other.outcomes);
    }
}

/// Runs `prop` over the cases of `space`, stopping at the first failure.
pub fn check_law<S, F>(
    law: &str,
    space: &S,
    budget: u64,
    seed: u64,
    mut prop: F,
) -> Result<LawOutcome>
where
    S: Space,
    F: FnMut(&S::Item) -> Result<Verdict>,
{
    let cases = Cases::new(space.len(), budget, seed);
    let exhaustive = cases.is_exhaustive();
    let mut checked = 0;
    for index in cases {
        let item = space.get(index);
        match prop(&item)? {
            Verdict::Pass => checked += 1,
            Verdict::Vacuous => {}
            Verdict::Fail(msg) => {
                return Ok(LawOutcome {
                    law: law.to_string(),
                    passed: false,
                    cases: checked + 1,
                    exhaustive,
                    counter_example: Some(msg),
                });
            }
        }
    }
    Ok(LawOutcome {
        law: law.to_string(),
        passed: true,
        cases: checked,
        exhaustive,
        counter_example: None,
    })
}

/// One offending (policy sequence, start state) pair found by an oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    /// Policy sequence rendered as one `state->control` map per step.
    pub policy_seq: String,
    pub state: String,
    /// Meaning depends on the oracle: (candidate, certified) for
    /// optimality, (val, val') for equivalence.
    pub left: Value,
    pub right: Value,
    /// Competing sequence that beats the certified one, for optimality.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub better: Option<String>,
}

/// Outcome of a brute-force oracle over enumerated policy sequences.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub check: String,
    pub passed: bool,
    pub sequences: u64,
    pub pairs: u64,
    pub witnesses: Vec<Witness>,
}

impl OracleReport {
    pub const MAX_WITNESSES: usize = 256;

    pub fn new(check: &str) -> Self {
        OracleReport {
            check: check.to_string(),
            passed: true,
            sequences: 0,
            pairs: 0,
            witnesses: Vec::new(),
        }
    }

    pub fn record(&mut self, witness: Witness) {
        self.passed = false;
        if self.witnesses.len() < Self::MAX_WITNESSES {
            self.witnesses.push(witness);
        }
    }

    pub fn first_witness(&self) -> Option<&Witness> {
        self.witnesses.first()
    }
}
