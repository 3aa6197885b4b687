//! Trajectory semantics: all possible state/control sequences under a
//! policy sequence, their summed rewards, and the measured total reward.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::{OracleReport, Witness};
use crate::sdp::{ControlId, StateId, ValidSpec};
use crate::solver::{enumerate_policy_seqs, show_state, val, Policy, PolicySeq};
use crate::uncertainty::MStruct;
use crate::value::Value;

/// One trajectory: state/control pairs followed by a final state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateCtrlSeq {
    pub start_step: usize,
    pub pairs: Vec<(StateId, ControlId)>,
    pub final_state: StateId,
}

impl StateCtrlSeq {
    pub fn last(t: usize, x: StateId) -> Self {
        StateCtrlSeq {
            start_step: t,
            pairs: Vec::new(),
            final_state: x,
        }
    }

    /// First state of the trajectory.
    pub fn head(&self) -> &StateId {
        self.pairs
            .first()
            .map(|(x, _)| x)
            .unwrap_or(&self.final_state)
    }

    fn prepended(mut self, x: &str, y: &str) -> Self {
        self.pairs.insert(0, (x.to_string(), y.to_string()));
        self.start_step -= 1;
        self
    }
}

impl fmt::Display for StateCtrlSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pairs.is_empty() {
            return write!(f, "Last {}", show_state(&self.final_state));
        }
        for (x, y) in &self.pairs {
            write!(f, "{}·{y} → ", show_state(x))?;
        }
        f.write_str(show_state(&self.final_state))
    }
}

/// The structure of possible trajectories from `x` under `ps`.
pub fn trj(spec: &ValidSpec, ps: &PolicySeq, x: &str) -> Result<MStruct<StateCtrlSeq>> {
    ps.check(spec)?;
    if !spec.has_state(ps.start_step, x)? {
        return Err(Error::UnknownState {
            t: ps.start_step,
            state: x.to_string(),
        });
    }
    let out = trj_from(spec, &ps.policies, ps.end_step(), x)?;
    assert!(
        out.is_not_empty(),
        "trj produced an empty structure on a valid problem"
    );
    Ok(out)
}

fn trj_from(
    spec: &ValidSpec,
    policies: &[Policy],
    end: usize,
    x: &str,
) -> Result<MStruct<StateCtrlSeq>> {
    let Some((p, rest)) = policies.split_first() else {
        return Ok(MStruct::pure(
            spec.kind,
            StateCtrlSeq::last(end, x.to_string()),
        ));
    };
    let y = p.get(x)?;
    let mx = spec.next(p.step, x, y)?;
    let continued = mx
        .map(|x2| trj_from(spec, rest, end, x2))
        .transpose_result()?
        .join()?;
    Ok(continued.map(|traj| traj.clone().prepended(x, y)))
}

/// Total reward collected along one trajectory.
pub fn sum_r(spec: &ValidSpec, traj: &StateCtrlSeq) -> Result<Value> {
    let steps = traj.pairs.len();
    let mut acc = spec.alg.zero.clone();
    for i in (0..steps).rev() {
        let t = traj.start_step + i;
        let (x, y) = &traj.pairs[i];
        let x2 = traj
            .pairs
            .get(i + 1)
            .map(|(s, _)| s)
            .unwrap_or(&traj.final_state);
        if !spec.controls(t, x)?.contains(y) {
            return Err(Error::Trajectory(format!(
                "control `{y}` is not admissible at ({t}, {x})"
            )));
        }
        if !spec.next(t, x, y)?.values().any(|s| s == x2) {
            return Err(Error::Trajectory(format!(
                "`{x2}` is not a possible successor of ({t}, {x}, {y})"
            )));
        }
        acc = spec.alg.plus(spec.reward(t, x, y, x2)?, &acc);
    }
    Ok(acc)
}

/// Measured total reward: `meas (map sum_r (trj ps x))`.
pub fn val_prime(spec: &ValidSpec, ps: &PolicySeq, x: &str) -> Result<Value> {
    let trajectories = trj(spec, ps, x)?;
    let sums = trajectories
        .map(|traj| sum_r(spec, traj))
        .transpose_result()?;
    spec.measure.apply(&sums)
}

/// Compares `val` and `val_prime` on every policy sequence of length
/// `0..=n_max` from `t` and every start state. Witnesses carry
/// `(val, val_prime)`.
pub fn check_val_equivalence(
    spec: &ValidSpec,
    t: usize,
    n_max: usize,
    cap: u128,
) -> Result<OracleReport> {
    spec.check_range(t, n_max)?;
    let mut report = OracleReport::new("val_equivalence");
    for n in 0..=n_max {
        for ps in enumerate_policy_seqs(spec, t, n, cap)? {
            report.sequences += 1;
            for x in spec.states(t)? {
                report.pairs += 1;
                let (v, v2) = (val(spec, &ps, x)?, val_prime(spec, &ps, x)?);
                if !spec.alg.eq(&v, &v2) {
                    report.record(Witness {
                        policy_seq: ps.to_string(),
                        state: x.clone(),
                        left: v,
                        right: v2,
                        better: None,
                    });
                }
            }
        }
    }
    Ok(report)
}
