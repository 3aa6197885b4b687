use thiserror::Error;

use crate::uncertainty::UncertaintyKind;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValueError {
    #[error("cannot parse `{0}` as a number")]
    Parse(String),
    #[error("value {0} is not representable in the {1} carrier")]
    NotRepresentable(String, &'static str),
    #[error("unknown carrier `{0}`")]
    UnknownCarrier(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Value(#[from] ValueError),

    #[error("kind mismatch: outer structure is {outer:?}, inner structure is {inner:?}")]
    KindMismatch {
        outer: UncertaintyKind,
        inner: UncertaintyKind,
    },

    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),
    #[error("measure `{measure}` is not defined for {kind:?} structures")]
    MeasureKind {
        measure: String,
        kind: UncertaintyKind,
    },
    #[error("measure `{measure}` needs division, which the {carrier} carrier lacks")]
    MeasureCarrier {
        measure: String,
        carrier: &'static str,
    },

    #[error("step {t} is outside the problem (start {start}, horizon {horizon})")]
    OutOfHorizon {
        t: usize,
        start: usize,
        horizon: usize,
    },
    #[error("range t={t}, n={n} is not solvable (start {start}, horizon {horizon})")]
    NotSolvable {
        t: usize,
        n: usize,
        start: usize,
        horizon: usize,
    },
    #[error("unknown state `{state}` at step {t}")]
    UnknownState { t: usize, state: String },
    #[error("control `{control}` is not admissible at state `{state}`, step {t}")]
    UnknownControl {
        t: usize,
        state: String,
        control: String,
    },
    #[error("no transition declared for ({t}, {state}, {control})")]
    MissingNext {
        t: usize,
        state: String,
        control: String,
    },
    #[error("no reward declared for ({t}, {state}, {control}, {next})")]
    MissingReward {
        t: usize,
        state: String,
        control: String,
        next: String,
    },
    #[error("problem `{name}` failed validation with {count} violation(s); first: {first}")]
    InvalidSpec {
        name: String,
        count: usize,
        first: String,
    },
    #[error("policy sequence is inconsistent: {0}")]
    PolicySeq(String),
    #[error("trajectory is inconsistent with the problem: {0}")]
    Trajectory(String),

    #[error("{law}: generated structure is empty but the law requires a non-empty one")]
    EmptyStructure { law: String },
    #[error("enumeration needs {count} policy sequences, above the cap of {cap}")]
    CapExceeded { count: u128, cap: u128 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
