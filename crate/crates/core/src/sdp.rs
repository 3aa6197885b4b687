//! Finite sequential decision problems with explicit per-step tables.

use std::fmt;
use std::ops::Deref;

use indexmap::IndexMap;
use serde::Serialize;

use crate::algebra::ValueAlgebra;
use crate::error::{Error, Result};
use crate::measures::Measure;
use crate::uncertainty::{MStruct, UncertaintyKind};
use crate::value::Value;

pub type StateId = String;
pub type ControlId = String;

/// Tables for one decision step. The terminal step only lists states.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepTable {
    pub states: Vec<StateId>,
    /// Admissible controls per state, in declared order.
    pub controls: IndexMap<StateId, Vec<ControlId>>,
    /// `next[x][y]`: structure of possible next states.
    pub next: IndexMap<StateId, IndexMap<ControlId, MStruct<StateId>>>,
    /// `reward[x][y][x']`.
    pub reward: IndexMap<StateId, IndexMap<ControlId, IndexMap<StateId, Value>>>,
}

impl StepTable {
    pub fn terminal(states: Vec<StateId>) -> Self {
        StepTable {
            states,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSpec {
    pub name: String,
    pub kind: UncertaintyKind,
    pub alg: ValueAlgebra,
    pub measure: Measure,
    pub start_step: usize,
    /// Number of decision steps available after `start_step`.
    pub horizon: usize,
    /// `steps[i]` describes step `start_step + i`, for `i` in `0..=horizon`.
    pub steps: Vec<StepTable>,
    /// States are strings of actions; enables the admissibility closure check.
    pub action_sequence_states: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    StepCount,
    DuplicateState,
    MissingControls,
    EmptyControls,
    UnknownState,
    MissingNext,
    NextNotEmpty,
    KindMismatch,
    NotAState,
    MissingReward,
    WeightNotPositive,
    WeightSum,
    CarrierMismatch,
    MeasureKind,
    Admissibility,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub t: usize,
    pub state: Option<StateId>,
    pub control: Option<ControlId>,
    pub next: Option<StateId>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at (t={}", self.kind, self.t)?;
        for part in [&self.state, &self.control, &self.next]
            .into_iter()
            .flatten()
        {
            write!(f, ", {part}")?;
        }
        write!(f, "): {}", self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    fn push(
        &mut self,
        kind: ViolationKind,
        t: usize,
        loc: (Option<&str>, Option<&str>, Option<&str>),
        message: impl Into<String>,
    ) {
        self.violations.push(Violation {
            kind,
            t,
            state: loc.0.map(str::to_string),
            control: loc.1.map(str::to_string),
            next: loc.2.map(str::to_string),
            message: message.into(),
        });
    }
}

impl SdpSpec {
    pub fn end_step(&self) -> usize {
        self.start_step + self.horizon
    }

    pub fn step(&self, t: usize) -> Result<&StepTable> {
        if t < self.start_step || t > self.end_step() {
            return Err(Error::OutOfHorizon {
                t,
                start: self.start_step,
                horizon: self.horizon,
            });
        }
        self.steps
            .get(t - self.start_step)
            .ok_or(Error::OutOfHorizon {
                t,
                start: self.start_step,
                horizon: self.horizon,
            })
    }

    pub fn states(&self, t: usize) -> Result<&[StateId]> {
        Ok(&self.step(t)?.states)
    }

    pub fn has_state(&self, t: usize, x: &str) -> Result<bool> {
        Ok(self.step(t)?.states.iter().any(|s| s == x))
    }

    pub fn controls(&self, t: usize, x: &str) -> Result<&[ControlId]> {
        self.step(t)?
            .controls
            .get(x)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownState {
                t,
                state: x.to_string(),
            })
    }

    pub fn next(&self, t: usize, x: &str, y: &str) -> Result<&MStruct<StateId>> {
        self.step(t)?
            .next
            .get(x)
            .and_then(|m| m.get(y))
            .ok_or_else(|| Error::MissingNext {
                t,
                state: x.to_string(),
                control: y.to_string(),
            })
    }

    pub fn reward(&self, t: usize, x: &str, y: &str, x_next: &str) -> Result<&Value> {
        self.step(t)?
            .reward
            .get(x)
            .and_then(|m| m.get(y))
            .and_then(|m| m.get(x_next))
            .ok_or_else(|| Error::MissingReward {
                t,
                state: x.to_string(),
                control: y.to_string(),
                next: x_next.to_string(),
            })
    }

    /// Checks every well-formedness requirement and lists each violation.
    pub fn validate(&self) -> ValidationReport {
        use ViolationKind::*;
        let mut report = ValidationReport::default();
        if self.steps.len() != self.horizon + 1 {
            report.push(
                StepCount,
                self.start_step,
                (None, None, None),
                format!(
                    "expected {} step tables, found {}",
                    self.horizon + 1,
                    self.steps.len()
                ),
            );
            return report;
        }
        if self.measure.kind != self.kind {
            report.push(
                MeasureKind,
                self.start_step,
                (None, None, None),
                format!(
                    "measure `{}` expects {:?} structures",
                    self.measure.name(),
                    self.measure.kind
                ),
            );
        }
        if self.alg.zero.carrier() != self.alg.carrier {
            report.push(
                CarrierMismatch,
                self.start_step,
                (None, None, None),
                "zero is not in the carrier",
            );
        }
        let tol = self.alg.eq_tolerance;
        let alphabet: Vec<&ControlId> = {
            let mut all: Vec<&ControlId> = Vec::new();
            for step in &self.steps {
                for ys in step.controls.values() {
                    for y in ys {
                        if !all.contains(&y) {
                            all.push(y);
                        }
                    }
                }
            }
            all
        };

        for (i, step) in self.steps.iter().enumerate() {
            let t = self.start_step + i;
            for (j, x) in step.states.iter().enumerate() {
                if step.states[..j].contains(x) {
                    report.push(
                        DuplicateState,
                        t,
                        (Some(x), None, None),
                        "state listed twice",
                    );
                }
            }
            if i == self.horizon {
                break;
            }
            let succ = &self.steps[i + 1].states;
            for x in step.controls.keys() {
                if !step.states.contains(x) {
                    report.push(
                        UnknownState,
                        t,
                        (Some(x), None, None),
                        "controls declared for an undeclared state",
                    );
                }
            }
            for x in &step.states {
                let Some(ys) = step.controls.get(x) else {
                    report.push(
                        MissingControls,
                        t,
                        (Some(x), None, None),
                        "no controls declared",
                    );
                    continue;
                };
                if ys.is_empty() {
                    report.push(
                        EmptyControls,
                        t,
                        (Some(x), None, None),
                        "control set is empty",
                    );
                }
                if self.action_sequence_states {
                    for a in &alphabet {
                        let offered = ys.contains(a);
                        let extended = format!("{x}{a}");
                        let admissible = succ.contains(&extended);
                        if offered != admissible {
                            report.push(
                                Admissibility,
                                t,
                                (Some(x), Some(a), None),
                                if offered {
                                    format!("control offered but `{extended}` is not a state at step {}", t + 1)
                                } else {
                                    format!("`{extended}` is a state at step {} but the control is not offered", t + 1)
                                },
                            );
                        }
                    }
                }
                for y in ys {
                    let Some(mx) = step.next.get(x).and_then(|m| m.get(y)) else {
                        report.push(
                            MissingNext,
                            t,
                            (Some(x), Some(y), None),
                            "no transition declared",
                        );
                        continue;
                    };
                    if mx.kind() != self.kind {
                        report.push(
                            KindMismatch,
                            t,
                            (Some(x), Some(y), None),
                            format!("transition is {:?}, problem is {:?}", mx.kind(), self.kind),
                        );
                    }
                    if mx.is_empty() {
                        report.push(
                            NextNotEmpty,
                            t,
                            (Some(x), Some(y), None),
                            "transition has no outcomes",
                        );
                    }
                    for (x2, w) in mx.entries() {
                        if !succ.contains(x2) {
                            report.push(
                                NotAState,
                                t,
                                (Some(x), Some(y), Some(x2)),
                                format!("outcome is not a state at step {}", t + 1),
                            );
                        }
                        match step
                            .reward
                            .get(x)
                            .and_then(|m| m.get(y))
                            .and_then(|m| m.get(x2))
                        {
                            None => report.push(
                                MissingReward,
                                t,
                                (Some(x), Some(y), Some(x2)),
                                "no reward declared",
                            ),
                            Some(r) if r.carrier() != self.alg.carrier => report.push(
                                CarrierMismatch,
                                t,
                                (Some(x), Some(y), Some(x2)),
                                format!(
                                    "reward {r} is not in the {} carrier",
                                    self.alg.carrier.name()
                                ),
                            ),
                            Some(_) => {}
                        }
                        if let Some(w) = w {
                            if !w.is_positive() {
                                report.push(
                                    WeightNotPositive,
                                    t,
                                    (Some(x), Some(y), Some(x2)),
                                    format!("weight {w} is not positive"),
                                );
                            }
                        }
                    }
                    if let Some(sum) = mx.weight_sum() {
                        if !sum.approx_eq(&Value::rational(1, 1), tol) {
                            report.push(
                                WeightSum,
                                t,
                                (Some(x), Some(y), None),
                                format!("weights sum to {sum}, not 1"),
                            );
                        }
                    }
                }
            }
        }
        report
    }

    /// Validates and wraps the problem so that it can be solved.
    pub fn validated(self) -> std::result::Result<ValidSpec, ValidationReport> {
        let report = self.validate();
        if report.is_valid() {
            Ok(ValidSpec(self))
        } else {
            Err(report)
        }
    }

    /// Like [`SdpSpec::validated`], with the report folded into an error.
    pub fn into_valid(self) -> Result<ValidSpec> {
        let name = self.name.clone();
        self.validated().map_err(|r| Error::InvalidSpec {
            name,
            count: r.violations.len(),
            first: r.violations[0].to_string(),
        })
    }
}

/// A problem that passed [`SdpSpec::validate`]. Solvers only accept these.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidSpec(SdpSpec);

impl ValidSpec {
    pub fn into_inner(self) -> SdpSpec {
        self.0
    }

    /// Whether `n` decision steps starting at `t` fit in the problem.
    pub fn is_solvable(&self, t: usize, n: usize) -> bool {
        t >= self.start_step && t + n <= self.end_step()
    }

    pub fn check_range(&self, t: usize, n: usize) -> Result<()> {
        if self.is_solvable(t, n) {
            Ok(())
        } else {
            Err(Error::NotSolvable {
                t,
                n,
                start: self.start_step,
                horizon: self.horizon,
            })
        }
    }
}

impl Deref for ValidSpec {
    type Target = SdpSpec;
    fn deref(&self) -> &SdpSpec {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BinOp;
    use crate::measures::make_measure;
    use crate::value::Carrier;

    fn tiny(kind: UncertaintyKind) -> SdpSpec {
        let alg = ValueAlgebra::numeric(Carrier::Rational, BinOp::Add);
        let measure = match kind {
            UncertaintyKind::Stoch => make_measure("expected", &alg).unwrap(),
            UncertaintyKind::NonDet => make_measure("min", &alg).unwrap(),
            UncertaintyKind::Identity => make_measure("identity", &alg).unwrap(),
        };
        let s = |x: &str| x.to_string();
        let mut step = StepTable {
            states: vec![s("a")],
            ..Default::default()
        };
        step.controls.insert(s("a"), vec![s("go")]);
        let next = match kind {
            UncertaintyKind::Stoch => MStruct::Stoch(vec![
                (s("b"), Value::rational(1, 2)),
                (s("c"), Value::rational(1, 2)),
            ]),
            UncertaintyKind::NonDet => MStruct::NonDet(vec![s("b"), s("c")]),
            UncertaintyKind::Identity => MStruct::Identity(s("b")),
        };
        step.next.entry(s("a")).or_default().insert(s("go"), next);
        let rewards = step
            .reward
            .entry(s("a"))
            .or_default()
            .entry(s("go"))
            .or_default();
        rewards.insert(s("b"), Value::rational(1, 1));
        rewards.insert(s("c"), Value::rational(2, 1));
        SdpSpec {
            name: s("tiny"),
            kind,
            alg,
            measure,
            start_step: 0,
            horizon: 1,
            steps: vec![step, StepTable::terminal(vec![s("b"), s("c")])],
            action_sequence_states: false,
        }
    }

    #[test]
    fn well_formed_problems_validate() {
        for kind in UncertaintyKind::ALL {
            let spec = tiny(kind);
            assert!(
                spec.validate().is_valid(),
                "{kind:?}: {:?}",
                spec.validate()
            );
        }
    }

    #[test]
    fn violations_are_located() {
        let mut spec = tiny(UncertaintyKind::NonDet);
        spec.steps[0].next["a"]["go"] = MStruct::NonDet(vec![]);
        let r = spec.validate();
        assert!(r.has(ViolationKind::NextNotEmpty));
        assert_eq!(r.violations[0].state.as_deref(), Some("a"));
        assert_eq!(r.violations[0].control.as_deref(), Some("go"));

        let mut spec = tiny(UncertaintyKind::NonDet);
        spec.steps[0].reward["a"]["go"].shift_remove("c");
        let r = spec.validate();
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].kind, ViolationKind::MissingReward);
        assert_eq!(r.violations[0].next.as_deref(), Some("c"));

        let mut spec = tiny(UncertaintyKind::NonDet);
        spec.steps[0].controls["a"].clear();
        assert!(spec.validate().has(ViolationKind::EmptyControls));

        let mut spec = tiny(UncertaintyKind::NonDet);
        spec.steps[1].states.pop();
        assert!(spec.validate().has(ViolationKind::NotAState));
    }

    #[test]
    fn stochastic_weights_must_sum_to_one() {
        let mut spec = tiny(UncertaintyKind::Stoch);
        spec.steps[0].next["a"]["go"] = MStruct::Stoch(vec![
            ("b".into(), Value::rational(1, 2)),
            ("c".into(), Value::rational(2, 5)),
        ]);
        let r = spec.validate();
        assert!(r.has(ViolationKind::WeightSum));
        assert!(r.violations[0].message.contains("9/10"));
    }

    #[test]
    fn mixed_kinds_and_measures_are_rejected() {
        let mut spec = tiny(UncertaintyKind::NonDet);
        spec.steps[0].next["a"]["go"] = MStruct::Identity("b".into());
        assert!(spec.validate().has(ViolationKind::KindMismatch));
        let mut spec = tiny(UncertaintyKind::NonDet);
        spec.kind = UncertaintyKind::Identity;
        assert!(spec.validate().has(ViolationKind::MeasureKind));
    }

    #[test]
    fn solvable_ranges() {
        let spec = tiny(UncertaintyKind::NonDet).into_valid().unwrap();
        assert!(spec.is_solvable(0, 1));
        assert!(spec.is_solvable(1, 0));
        assert!(!spec.is_solvable(0, 2));
        assert!(matches!(
            spec.check_range(1, 1),
            Err(Error::NotSolvable { .. })
        ));
        assert!(matches!(spec.states(5), Err(Error::OutOfHorizon { .. })));
        assert!(matches!(
            spec.reward(0, "a", "go", "zz"),
            Err(Error::MissingReward { .. })
        ));
    }

    #[test]
    fn invalid_specs_cannot_be_wrapped() {
        let mut spec = tiny(UncertaintyKind::NonDet);
        spec.steps[0].controls["a"].clear();
        let err = spec.into_valid().unwrap_err();
        assert!(matches!(err, Error::InvalidSpec { count: 1, .. }));
    }
}
