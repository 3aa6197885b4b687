//! Backward induction and brute-force optimality oracles.

use std::fmt;

use indexmap::IndexMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::{OracleReport, Witness};
use crate::sdp::{ControlId, StateId, ValidSpec};
use crate::trajectories::val_prime;
use crate::value::Value;

/// Default bound on the number of policy sequences an oracle may enumerate.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

/// A decision rule for one step: a control for every state of that step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Policy {
    pub step: usize,
    pub choice: IndexMap<StateId, ControlId>,
}

impl Policy {
    pub fn new(step: usize, choice: IndexMap<StateId, ControlId>) -> Self {
        Policy { step, choice }
    }

    /// The same control in every state of step `t`.
    pub fn constant(spec: &ValidSpec, t: usize, control: &str) -> Result<Self> {
        let choice = spec
            .states(t)?
            .iter()
            .map(|x| (x.clone(), control.to_string()))
            .collect();
        let p = Policy { step: t, choice };
        p.check(spec)?;
        Ok(p)
    }

    pub fn get(&self, x: &str) -> Result<&ControlId> {
        self.choice.get(x).ok_or_else(|| Error::UnknownState {
            t: self.step,
            state: x.to_string(),
        })
    }

    /// Every state of the step has an admissible control.
    pub fn check(&self, spec: &ValidSpec) -> Result<()> {
        for x in spec.states(self.step)? {
            let y = self.get(x)?;
            if !spec.controls(self.step, x)?.contains(y) {
                return Err(Error::UnknownControl {
                    t: self.step,
                    state: x.clone(),
                    control: y.clone(),
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self
            .choice
            .iter()
            .map(|(x, y)| format!("{}↦{y}", show_state(x)))
            .collect();
        write!(f, "{{{}}}@{}", body.join(", "), self.step)
    }
}

/// Policies for consecutive steps `start_step, start_step + 1, ...`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolicySeq {
    pub start_step: usize,
    pub policies: Vec<Policy>,
}

impl PolicySeq {
    pub fn empty(t: usize) -> Self {
        PolicySeq {
            start_step: t,
            policies: Vec::new(),
        }
    }

    pub fn new(start_step: usize, policies: Vec<Policy>) -> Result<Self> {
        for (i, p) in policies.iter().enumerate() {
            if p.step != start_step + i {
                return Err(Error::PolicySeq(format!(
                    "policy {i} is for step {}, expected {}",
                    p.step,
                    start_step + i
                )));
            }
        }
        Ok(PolicySeq {
            start_step,
            policies,
        })
    }

    /// Builds a sequence of constant policies, one control name per step.
    pub fn constant(spec: &ValidSpec, t: usize, controls: &[&str]) -> Result<Self> {
        let policies = controls
            .iter()
            .enumerate()
            .map(|(i, y)| Policy::constant(spec, t + i, y))
            .collect::<Result<_>>()?;
        PolicySeq::new(t, policies)
    }

    pub fn len(&self) -> usize {
        self.policies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.policies.is_empty()
    }

    pub fn end_step(&self) -> usize {
        self.start_step + self.len()
    }

    /// `p :: self`; `p` must be for the step just before this sequence.
    pub fn prepend(&self, p: Policy) -> Result<PolicySeq> {
        if p.step + 1 != self.start_step {
            return Err(Error::PolicySeq(format!(
                "cannot prepend a policy for step {} to a sequence starting at {}",
                p.step, self.start_step
            )));
        }
        let mut policies = Vec::with_capacity(self.len() + 1);
        policies.push(p);
        policies.extend(self.policies.iter().cloned());
        Ok(PolicySeq {
            start_step: self.start_step - 1,
            policies,
        })
    }

    pub fn tail(&self) -> PolicySeq {
        PolicySeq {
            start_step: self.start_step + 1,
            policies: self.policies[1..].to_vec(),
        }
    }

    /// Checks step range and admissibility against the problem.
    pub fn check(&self, spec: &ValidSpec) -> Result<()> {
        spec.check_range(self.start_step, self.len())?;
        self.policies.iter().try_for_each(|p| p.check(spec))
    }
}

impl fmt::Display for PolicySeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.policies.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", body.join(", "))
    }
}

/// States are displayed verbatim, except the empty state, shown as `ε`.
pub fn show_state(x: &str) -> &str {
    if x.is_empty() {
        "ε"
    } else {
        x
    }
}

/// How `val` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ValStrategy {
    /// One value table per step, computed from the last step backwards.
    #[default]
    Tabulated,
    /// Direct recursion without sharing; exponential, for differential tests.
    Naive,
}

/// Which value semantics an oracle compares with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueFn {
    Val,
    ValPrime,
}

impl ValueFn {
    pub fn name(self) -> &'static str {
        match self {
            ValueFn::Val => "val",
            ValueFn::ValPrime => "val_prime",
        }
    }

    pub fn eval(self, spec: &ValidSpec, ps: &PolicySeq, x: &str) -> Result<Value> {
        match self {
            ValueFn::Val => val(spec, ps, x),
            ValueFn::ValPrime => val_prime(spec, ps, x),
        }
    }
}

type ValueTable = IndexMap<StateId, Value>;

fn zero_table(spec: &ValidSpec, t: usize) -> Result<ValueTable> {
    Ok(spec
        .states(t)?
        .iter()
        .map(|x| (x.clone(), spec.alg.zero.clone()))
        .collect())
}

/// `meas (map (x' ↦ reward t x y x' ⊕ next_val x') (next t x y))`
fn local_value(
    spec: &ValidSpec,
    t: usize,
    x: &str,
    y: &str,
    mut next_val: impl FnMut(&str) -> Result<Value>,
) -> Result<Value> {
    let mx = spec.next(t, x, y)?;
    let rewarded = mx
        .map(|x2| -> Result<Value> { Ok(spec.alg.plus(spec.reward(t, x, y, x2)?, &next_val(x2)?)) })
        .transpose_result()?;
    spec.measure.apply(&rewarded)
}

fn lookup(table: &ValueTable, t: usize, x: &str) -> Result<Value> {
    table.get(x).cloned().ok_or_else(|| Error::UnknownState {
        t,
        state: x.to_string(),
    })
}

/// Values of `ps` for every state of its first step.
pub fn value_table(spec: &ValidSpec, ps: &PolicySeq) -> Result<IndexMap<StateId, Value>> {
    ps.check(spec)?;
    let mut table = zero_table(spec, ps.end_step())?;
    for p in ps.policies.iter().rev() {
        let t = p.step;
        let mut current = ValueTable::new();
        for x in spec.states(t)? {
            let v = local_value(spec, t, x, p.get(x)?, |x2| lookup(&table, t + 1, x2))?;
            current.insert(x.clone(), v);
        }
        table = current;
    }
    Ok(table)
}

/// The backward-induction value of `ps` from state `x`.
pub fn val(spec: &ValidSpec, ps: &PolicySeq, x: &str) -> Result<Value> {
    val_with(spec, ps, x, ValStrategy::Tabulated)
}

pub fn val_with(spec: &ValidSpec, ps: &PolicySeq, x: &str, strategy: ValStrategy) -> Result<Value> {
    if !spec.has_state(ps.start_step, x)? {
        return Err(Error::UnknownState {
            t: ps.start_step,
            state: x.to_string(),
        });
    }
    match strategy {
        ValStrategy::Tabulated => lookup(&value_table(spec, ps)?, ps.start_step, x),
        ValStrategy::Naive => {
            ps.check(spec)?;
            val_naive(spec, &ps.policies, x)
        }
    }
}

fn val_naive(spec: &ValidSpec, policies: &[Policy], x: &str) -> Result<Value> {
    match policies.split_first() {
        None => Ok(spec.alg.zero.clone()),
        Some((p, rest)) => local_value(spec, p.step, x, p.get(x)?, |x2| val_naive(spec, rest, x2)),
    }
}

fn step_before(spec: &ValidSpec, ps: &PolicySeq) -> Result<usize> {
    if ps.start_step <= spec.start_step {
        return Err(Error::NotSolvable {
            t: ps.start_step.saturating_sub(1),
            n: ps.len() + 1,
            start: spec.start_step,
            horizon: spec.horizon,
        });
    }
    Ok(ps.start_step - 1)
}

/// Value of taking `y` in `x` one step before `ps` starts, then following `ps`.
pub fn cval(spec: &ValidSpec, ps: &PolicySeq, x: &str, y: &str) -> Result<Value> {
    let t = step_before(spec, ps)?;
    if !spec.controls(t, x)?.iter().any(|c| c == y) {
        return Err(Error::UnknownControl {
            t,
            state: x.to_string(),
            control: y.to_string(),
        });
    }
    let table = value_table(spec, ps)?;
    local_value(spec, t, x, y, |x2| lookup(&table, t + 1, x2))
}

/// Index of the first value that every other value is below.
fn first_maximal(spec: &ValidSpec, values: &[Value]) -> usize {
    let alg = &spec.alg;
    (0..values.len())
        .find(|&i| values.iter().all(|v| alg.leq(v, &values[i])))
        .unwrap_or_else(|| {
            // only reachable with a non-total preorder; fall back to a scan
            (1..values.len()).fold(0, |best, j| {
                if alg.leq(&values[j], &values[best]) {
                    best
                } else {
                    j
                }
            })
        })
}

fn opt_ext_from_table(
    spec: &ValidSpec,
    t: usize,
    next: &ValueTable,
) -> Result<(Policy, ValueTable)> {
    let mut choice = IndexMap::new();
    let mut table = ValueTable::new();
    for x in spec.states(t)? {
        let ys = spec.controls(t, x)?;
        let values = ys
            .iter()
            .map(|y| local_value(spec, t, x, y, |x2| lookup(next, t + 1, x2)))
            .collect::<Result<Vec<_>>>()?;
        let best = first_maximal(spec, &values);
        choice.insert(x.clone(), ys[best].clone());
        table.insert(x.clone(), values[best].clone());
    }
    Ok((Policy { step: t, choice }, table))
}

/// Optimal extension of `ps`: per state, the first control (in declared
/// order) whose `cval` is ⊑-maximal.
pub fn opt_ext(spec: &ValidSpec, ps: &PolicySeq) -> Result<Policy> {
    let t = step_before(spec, ps)?;
    let table = value_table(spec, ps)?;
    Ok(opt_ext_from_table(spec, t, &table)?.0)
}

/// Backward induction: `n` optimal policies starting at step `t`.
pub fn bi(spec: &ValidSpec, t: usize, n: usize) -> Result<PolicySeq> {
    bi_with(spec, t, n, ValStrategy::Tabulated)
}

pub fn bi_with(spec: &ValidSpec, t: usize, n: usize, strategy: ValStrategy) -> Result<PolicySeq> {
    spec.check_range(t, n)?;
    let mut ps = PolicySeq::empty(t + n);
    match strategy {
        ValStrategy::Tabulated => {
            let mut table = zero_table(spec, t + n)?;
            for k in (t..t + n).rev() {
                let (p, next_table) = opt_ext_from_table(spec, k, &table)?;
                ps = ps.prepend(p)?;
                table = next_table;
            }
        }
        ValStrategy::Naive => {
            for k in (t..t + n).rev() {
                let mut choice = IndexMap::new();
                for x in spec.states(k)? {
                    let ys = spec.controls(k, x)?;
                    let values = ys
                        .iter()
                        .map(|y| local_value(spec, k, x, y, |x2| val_naive(spec, &ps.policies, x2)))
                        .collect::<Result<Vec<_>>>()?;
                    choice.insert(x.clone(), ys[first_maximal(spec, &values)].clone());
                }
                ps = ps.prepend(Policy { step: k, choice })?;
            }
        }
    }
    Ok(ps)
}

/// Number of policy sequences of length `n` starting at `t`.
pub fn count_policy_seqs(spec: &ValidSpec, t: usize, n: usize) -> Result<u128> {
    spec.check_range(t, n)?;
    let mut count: u128 = 1;
    for k in t..t + n {
        for x in spec.states(k)? {
            count = count.saturating_mul(spec.controls(k, x)?.len() as u128);
        }
    }
    Ok(count)
}

/// All policy sequences of length `n` from step `t`, in lexicographic order
/// of control indices (earlier steps and earlier states most significant).
pub fn enumerate_policy_seqs(
    spec: &ValidSpec,
    t: usize,
    n: usize,
    cap: u128,
) -> Result<Vec<PolicySeq>> {
    let count = count_policy_seqs(spec, t, n)?;
    if count > cap {
        return Err(Error::CapExceeded { count, cap });
    }
    let mut slots: Vec<(usize, &StateId, &[ControlId])> = Vec::new();
    for k in t..t + n {
        for x in spec.states(k)? {
            slots.push((k, x, spec.controls(k, x)?));
        }
    }
    let mut digits = vec![0usize; slots.len()];
    let mut out = Vec::with_capacity(count as usize);
    loop {
        let mut policies: Vec<Policy> = (t..t + n)
            .map(|k| Policy {
                step: k,
                choice: IndexMap::new(),
            })
            .collect();
        for ((k, x, ys), &d) in slots.iter().zip(&digits) {
            policies[k - t].choice.insert((*x).clone(), ys[d].clone());
        }
        out.push(PolicySeq {
            start_step: t,
            policies,
        });
        // odometer increment, last slot least significant
        let mut i = slots.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < slots[i].2.len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

fn values_for(
    spec: &ValidSpec,
    ps: &PolicySeq,
    value_fn: ValueFn,
) -> Result<Vec<(StateId, Value)>> {
    match value_fn {
        ValueFn::Val => Ok(value_table(spec, ps)?.into_iter().collect()),
        ValueFn::ValPrime => spec
            .states(ps.start_step)?
            .iter()
            .map(|x| Ok((x.clone(), val_prime(spec, ps, x)?)))
            .collect(),
    }
}

/// Checks `value_fn(ps', x) ⊑ value_fn(ps, x)` for every enumerated `ps'`
/// of the same length and every start state.
pub fn check_optimality(
    spec: &ValidSpec,
    ps: &PolicySeq,
    value_fn: ValueFn,
    cap: u128,
) -> Result<OracleReport> {
    ps.check(spec)?;
    let mut report = OracleReport::new(&format!("optimality({})", value_fn.name()));
    let certified = values_for(spec, ps, value_fn)?;
    for other in enumerate_policy_seqs(spec, ps.start_step, ps.len(), cap)? {
        report.sequences += 1;
        for ((x, candidate), (_, best)) in values_for(spec, &other, value_fn)?
            .into_iter()
            .zip(&certified)
        {
            report.pairs += 1;
            if !spec.alg.leq(&candidate, best) {
                report.record(Witness {
                    policy_seq: ps.to_string(),
                    state: x,
                    left: candidate,
                    right: best.clone(),
                    better: Some(other.to_string()),
                });
            }
        }
    }
    Ok(report)
}

/// Executable Bellman principle: for every policy sequence of length `n - 1`
/// from `t + 1` that is optimal by enumeration, prepending its optimal
/// extension gives a sequence that is optimal by enumeration at `t`.
pub fn check_bellman(spec: &ValidSpec, t: usize, n: usize, cap: u128) -> Result<OracleReport> {
    spec.check_range(t, n)?;
    let mut report = OracleReport::new("bellman");
    if n == 0 {
        // the empty sequence is the only one, hence optimal
        report.sequences = 1;
        report.pairs = spec.states(t)?.len() as u64;
        return Ok(report);
    }
    let tails = enumerate_policy_seqs(spec, t + 1, n - 1, cap)?;
    let heads = enumerate_policy_seqs(spec, t, n, cap)?;
    let tail_tables = tails
        .iter()
        .map(|ps| value_table(spec, ps))
        .collect::<Result<Vec<_>>>()?;
    let head_tables = heads
        .iter()
        .map(|ps| value_table(spec, ps))
        .collect::<Result<Vec<_>>>()?;
    let dominates = |best: &ValueTable, all: &[ValueTable]| {
        all.iter()
            .all(|other| other.iter().all(|(x, v)| spec.alg.leq(v, &best[x])))
    };
    for (tail, table) in tails.iter().zip(&tail_tables) {
        if !dominates(table, &tail_tables) {
            continue;
        }
        let extended = tail.prepend(opt_ext(spec, tail)?)?;
        let ext_table = value_table(spec, &extended)?;
        report.sequences += 1;
        for (other, other_table) in heads.iter().zip(&head_tables) {
            for (x, v) in other_table {
                report.pairs += 1;
                if !spec.alg.leq(v, &ext_table[x]) {
                    report.record(Witness {
                        policy_seq: extended.to_string(),
                        state: x.clone(),
                        left: v.clone(),
                        right: ext_table[x].clone(),
                        better: Some(other.to_string()),
                    });
                }
            }
        }
    }
    if report.sequences == 0 {
        report.passed = false;
    }
    Ok(report)
}
