//! Built-in problems: the emissions ("climate") problem, the four-operation
//! scheduling problem, and a stochastic variant of the climate problem.

use indexmap::IndexMap;

use crate::algebra::{BinOp, ValueAlgebra};
use crate::error::{Error, Result};
use crate::measures::make_measure;
use crate::sdp::{SdpSpec, StepTable, ValidSpec};
use crate::solver::PolicySeq;
use crate::trajectories::trj;
use crate::uncertainty::{MStruct, UncertaintyKind};
use crate::value::{Carrier, Value};

pub const GOOD: &str = "Good";
pub const BAD: &str = "Bad";
pub const HIGH: &str = "High";
pub const LOW: &str = "Low";

/// Decision steps in the shipped climate problems.
pub const CLIMATE_HORIZON: usize = 3;

fn s(x: &str) -> String {
    x.to_string()
}

/// Reward for reaching `next` after choosing `control`.
fn climate_reward(control: &str, next: &str) -> i64 {
    match (control, next) {
        (LOW, GOOD) => 3,
        (HIGH, GOOD) => 2,
        (LOW, BAD) => 1,
        _ => 0,
    }
}

fn climate_like(
    name: &str,
    kind: UncertaintyKind,
    carrier: Carrier,
    measure_name: &str,
    next: impl Fn(&str, &str) -> MStruct<String>,
) -> Result<SdpSpec> {
    let alg = ValueAlgebra::numeric(carrier, BinOp::Add);
    let measure = make_measure(measure_name, &alg)?;
    if measure.kind != kind {
        return Err(Error::MeasureKind {
            measure: measure_name.to_string(),
            kind,
        });
    }
    let mut step = StepTable {
        states: vec![s(GOOD), s(BAD)],
        ..Default::default()
    };
    for x in [GOOD, BAD] {
        step.controls.insert(s(x), vec![s(HIGH), s(LOW)]);
        for y in [HIGH, LOW] {
            step.next.entry(s(x)).or_default().insert(s(y), next(x, y));
            let rewards: IndexMap<String, Value> = [GOOD, BAD]
                .iter()
                .map(|&x2| (s(x2), carrier.from_i64(climate_reward(y, x2))))
                .collect();
            step.reward.entry(s(x)).or_default().insert(s(y), rewards);
        }
    }
    let mut steps = vec![step; CLIMATE_HORIZON];
    steps.push(StepTable::terminal(vec![s(GOOD), s(BAD)]));
    Ok(SdpSpec {
        name: name.to_string(),
        kind,
        alg,
        measure,
        start_step: 0,
        horizon: CLIMATE_HORIZON,
        steps,
        action_sequence_states: false,
    })
}

/// The non-deterministic climate problem with integer rewards and the named
/// measure. Low emissions in a good world keep it good; high emissions in a
/// bad world keep it bad; every other choice may lead to either state.
pub fn climate_spec(measure_name: &str) -> Result<SdpSpec> {
    climate_like(
        &format!("climate-{measure_name}"),
        UncertaintyKind::NonDet,
        Carrier::Int,
        measure_name,
        |x, y| match (x, y) {
            (GOOD, LOW) => MStruct::NonDet(vec![s(GOOD)]),
            (BAD, HIGH) => MStruct::NonDet(vec![s(BAD)]),
            _ => MStruct::NonDet(vec![s(GOOD), s(BAD)]),
        },
    )
}

/// Climate problem with probabilities: the two-outcome branches stay in the
/// current state with probability 4/5. Rational carrier, expected value.
pub fn stochastic_climate_spec() -> SdpSpec {
    let stay = Value::rational(4, 5);
    let leave = Value::rational(1, 5);
    let one = Value::rational(1, 1);
    climate_like(
        "stochastic-climate",
        UncertaintyKind::Stoch,
        Carrier::Rational,
        "expected",
        |x, y| match (x, y) {
            (GOOD, LOW) => MStruct::Stoch(vec![(s(GOOD), one.clone())]),
            (BAD, HIGH) => MStruct::Stoch(vec![(s(BAD), one.clone())]),
            (GOOD, _) => MStruct::Stoch(vec![(s(GOOD), stay.clone()), (s(BAD), leave.clone())]),
            _ => MStruct::Stoch(vec![(s(GOOD), leave.clone()), (s(BAD), stay.clone())]),
        },
    )
    .expect("expected value is a stochastic measure")
}

/// The four operations of the scheduling problem.
pub const OPERATIONS: [char; 4] = ['A', 'B', 'C', 'D'];

/// B needs A first and D needs C first; no operation twice.
pub fn is_admissible_prefix(prefix: &str) -> bool {
    let mut seen = String::new();
    for op in prefix.chars() {
        let ok = OPERATIONS.contains(&op)
            && !seen.contains(op)
            && match op {
                'B' => seen.contains('A'),
                'D' => seen.contains('C'),
                _ => true,
            };
        if !ok {
            return false;
        }
        seen.push(op);
    }
    true
}

/// Admissible prefixes of length `len`, in lexicographic order.
pub fn admissible_prefixes(len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    for _ in 0..len {
        out = out
            .iter()
            .flat_map(|p| OPERATIONS.iter().map(move |op| format!("{p}{op}")))
            .filter(|p| is_admissible_prefix(p))
            .collect();
    }
    out
}

/// Set-up cost of starting with `op`.
pub fn start_cost(op: char) -> i64 {
    match op {
        'A' => 3,
        'C' => 1,
        _ => 3,
    }
}

/// Set-up cost of running `b` directly after `a`.
pub fn switch_cost(a: char, b: char) -> i64 {
    match (a, b) {
        ('C', 'A') | ('A', 'B') => 1,
        ('B', 'D') => 2,
        _ => 3,
    }
}

/// Total set-up cost of a complete order.
pub fn order_cost(order: &str) -> i64 {
    let ops: Vec<char> = order.chars().collect();
    ops.first().map_or(0, |&op| start_cost(op))
        + ops.windows(2).map(|w| switch_cost(w[0], w[1])).sum::<i64>()
}

/// The single operation missing from a length-3 prefix.
fn remaining(prefix: &str) -> char {
    OPERATIONS
        .into_iter()
        .find(|op| !prefix.contains(*op))
        .expect("prefix of length 3")
}

/// Deterministic scheduling problem. States are the admissible prefixes of
/// operations; rewards are negated set-up costs. The last operation is
/// forced, so its cost is charged in the third step and the value of a
/// three-step policy sequence is minus the cost of the complete order.
pub fn scheduling_spec() -> SdpSpec {
    let alg = ValueAlgebra::numeric(Carrier::Int, BinOp::Add);
    let measure = make_measure("identity", &alg).expect("identity measure exists");
    let mut steps = Vec::new();
    for t in 0..3 {
        let mut step = StepTable {
            states: admissible_prefixes(t),
            ..Default::default()
        };
        for x in step.states.clone() {
            let mut controls = Vec::new();
            for op in OPERATIONS {
                let x2 = format!("{x}{op}");
                if !is_admissible_prefix(&x2) {
                    continue;
                }
                let mut cost = match x.chars().last() {
                    None => start_cost(op),
                    Some(prev) => switch_cost(prev, op),
                };
                if t == 2 {
                    cost += switch_cost(op, remaining(&x2));
                }
                let y = op.to_string();
                step.next
                    .entry(x.clone())
                    .or_default()
                    .insert(y.clone(), MStruct::Identity(x2.clone()));
                step.reward
                    .entry(x.clone())
                    .or_default()
                    .entry(y.clone())
                    .or_default()
                    .insert(x2, Value::Int(-cost));
                controls.push(y);
            }
            step.controls.insert(x, controls);
        }
        steps.push(step);
    }
    steps.push(StepTable::terminal(admissible_prefixes(3)));
    SdpSpec {
        name: s("scheduling"),
        kind: UncertaintyKind::Identity,
        alg,
        measure,
        start_step: 0,
        horizon: 3,
        steps,
        action_sequence_states: true,
    }
}

/// Follows a policy sequence through a deterministic action-sequence problem
/// from `x` and returns the final state. When exactly one action of the
/// problem's alphabet is still unused it is forced, and it is appended.
pub fn traced_order(spec: &ValidSpec, ps: &PolicySeq, x: &str) -> Result<String> {
    let trajectories = trj(spec, ps, x)?;
    let traj = trajectories
        .values()
        .next()
        .ok_or_else(|| Error::Trajectory("no trajectory".to_string()))?;
    let mut order = traj.final_state.clone();
    if spec.action_sequence_states {
        let mut unused: Vec<&String> = Vec::new();
        for step in &spec.steps {
            for y in step.controls.values().flatten() {
                if !order.contains(y.as_str()) && !unused.contains(&y) {
                    unused.push(y);
                }
            }
        }
        if let [only] = unused[..] {
            order.push_str(only);
        }
    }
    Ok(order)
}
