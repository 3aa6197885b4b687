//! The subcommands. Each returns its exit code and the text for stdout so
//! that nothing is printed before all checks have finished.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use indexmap::IndexMap;
use serde::Serialize;
use serde_json::{json, Value as Json};
use thiserror::Error;

use monadic_sdp::examples::{climate_spec, scheduling_spec, stochastic_climate_spec, traced_order};
use monadic_sdp::report::OracleReport;
use monadic_sdp::sdp::ValidSpec;
use monadic_sdp::solver::{
    bi, check_bellman, check_optimality, enumerate_policy_seqs, show_state, val, Policy, PolicySeq,
    ValueFn, DEFAULT_ENUMERATION_CAP,
};
use monadic_sdp::trajectories::{check_val_equivalence, sum_r, trj, val_prime};
use monadic_sdp::uncertainty::{MStruct, UncertaintyKind};
use monadic_sdp::value::Value;
use monadic_sdp::verify::{run_verification, CheckStatus, VerificationReport};

use crate::problem::{parse_problem_file, to_problem_file, value_to_json, ProblemError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Core(#[from] monadic_sdp::error::Error),
    #[error("{0}")]
    Usage(String),
}

pub type CliResult<T> = Result<T, CliError>;

/// What a command wants written to stdout, and how the process should exit.
#[derive(Debug)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output {
            code: EXIT_OK,
            stdout,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ValueFnArg {
    Val,
    ValPrime,
    Both,
}

impl ValueFnArg {
    fn wants(self, f: ValueFn) -> bool {
        matches!(
            (self, f),
            (ValueFnArg::Both, _)
                | (ValueFnArg::Val, ValueFn::Val)
                | (ValueFnArg::ValPrime, ValueFn::ValPrime)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolicyArg {
    Optimal,
    All,
    File(PathBuf),
}

impl FromStr for PolicyArg {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "optimal" => PolicyArg::Optimal,
            "all" => PolicyArg::All,
            path => PolicyArg::File(PathBuf::from(path)),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OracleCheck {
    Equivalence,
    Optimality,
    Bellman,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ExampleName {
    Climate,
    StochasticClimate,
    Scheduling,
}

/// Decision range; defaults to the whole problem from its first step.
#[derive(Debug, Clone, Copy, Default)]
pub struct Range {
    pub step: Option<usize>,
    pub horizon: Option<usize>,
}

impl Range {
    fn resolve(self, spec: &ValidSpec) -> CliResult<(usize, usize)> {
        let t = self.step.unwrap_or(spec.start_step);
        let n = match self.horizon {
            Some(n) => n,
            None => spec.end_step().checked_sub(t).ok_or_else(|| {
                CliError::Usage(format!(
                    "step {t} is past the last step {} of the problem",
                    spec.end_step()
                ))
            })?,
        };
        spec.check_range(t, n)?;
        Ok((t, n))
    }
}

fn json_out<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn header(spec: &ValidSpec) -> String {
    format!(
        "problem {}: {}, measure {}, {} carrier",
        spec.name,
        spec.kind.name(),
        spec.measure.name(),
        spec.alg.carrier.name()
    )
}

/// Left-aligned columns separated by two spaces, trailing spaces trimmed.
fn table(rows: &[Vec<String>], indent: &str) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = indent.to_string();
        for (c, cell) in row.iter().enumerate() {
            line.push_str(cell);
            if c + 1 < row.len() {
                line.push_str(&" ".repeat(widths[c] - cell.chars().count() + 2));
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn policy_json(p: &Policy) -> Json {
    json!({"step": p.step, "choice": p.choice})
}

// ---------------------------------------------------------------- solve

pub fn cmd_solve(
    file: &Path,
    range: Range,
    value_fn: ValueFnArg,
    format: Format,
) -> CliResult<Output> {
    let spec = parse_problem_file(file)?;
    let (t, n) = range.resolve(&spec)?;
    let ps = bi(&spec, t, n)?;
    let mut values = Vec::new();
    for x in spec.states(t)? {
        let v = if value_fn.wants(ValueFn::Val) {
            Some(val(&spec, &ps, x)?)
        } else {
            None
        };
        let v2 = if value_fn.wants(ValueFn::ValPrime) {
            Some(val_prime(&spec, &ps, x)?)
        } else {
            None
        };
        values.push((x.clone(), v, v2));
    }
    let mut traces = Vec::new();
    if spec.kind == UncertaintyKind::Identity {
        for x in spec.states(t)? {
            let only = trj(&spec, &ps, x)?
                .values()
                .next()
                .cloned()
                .expect("identity trajectory");
            traces.push((x.clone(), only.to_string(), traced_order(&spec, &ps, x)?));
        }
    }

    let stdout = match format {
        Format::Json => {
            let values: Vec<Json> = values
                .iter()
                .map(|(x, v, v2)| {
                    let mut o = serde_json::Map::new();
                    o.insert("state".into(), json!(x));
                    if let Some(v) = v {
                        o.insert("val".into(), value_to_json(v));
                    }
                    if let Some(v2) = v2 {
                        o.insert("val_prime".into(), value_to_json(v2));
                    }
                    Json::Object(o)
                })
                .collect();
            let mut doc = json!({
                "problem": spec.name,
                "step": t,
                "horizon": n,
                "policies": ps.policies.iter().map(policy_json).collect::<Vec<_>>(),
                "values": values,
            });
            if spec.kind == UncertaintyKind::Identity {
                doc["traces"] = traces
                    .iter()
                    .map(|(x, traj, order)| json!({"state": x, "trajectory": traj, "order": order}))
                    .collect();
            }
            json_out(&doc)
        }
        Format::Text => {
            let mut s = format!(
                "{}\nbackward induction from step {t} over {n} step(s)\n\npolicy\n",
                header(&spec)
            );
            if ps.is_empty() {
                s.push_str("  (no decisions)\n");
            }
            for p in &ps.policies {
                let choice: Vec<String> = p
                    .choice
                    .iter()
                    .map(|(x, y)| format!("{} ↦ {y}", show_state(x)))
                    .collect();
                s.push_str(&format!("  step {}: {}\n", p.step, choice.join(", ")));
            }
            s.push_str("\nvalues\n");
            let mut rows = vec![vec!["state".to_string()]];
            if value_fn.wants(ValueFn::Val) {
                rows[0].push("val".into());
            }
            if value_fn.wants(ValueFn::ValPrime) {
                rows[0].push("val'".into());
            }
            for (x, v, v2) in &values {
                let mut row = vec![show_state(x).to_string()];
                row.extend(v.iter().chain(v2.iter()).map(Value::to_string));
                rows.push(row);
            }
            s.push_str(&table(&rows, "  "));
            if !traces.is_empty() {
                s.push_str("\ntraces\n");
                for (x, traj, order) in &traces {
                    s.push_str(&format!(
                        "  from {}: {traj}  (order {})\n",
                        show_state(x),
                        show_state(order)
                    ));
                }
            }
            s
        }
    };
    Ok(Output::ok(stdout))
}

// ---------------------------------------------------------------- verify

pub fn render_verification(r: &VerificationReport) -> String {
    let mut s = format!(
        "verification of {} ({}, measure {}, {} carrier)\nstep {}, horizon {}, budget {}, seed {}\nvalue grid: {}\n\n",
        r.spec,
        r.uncertainty,
        r.measure,
        r.carrier,
        r.step,
        r.horizon,
        r.budget,
        r.seed,
        r.value_grid.iter().map(Value::to_string).collect::<Vec<_>>().join(", ")
    );
    let mut rows = Vec::new();
    for c in &r.checks {
        let status = match c.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "SKIP",
        };
        let detail = if let Some(reason) = &c.reason {
            reason.clone()
        } else if let Some(o) = &c.oracle {
            let mut d = format!("{} sequences, {} pairs", o.sequences, o.pairs);
            if !o.passed {
                d.push_str(&format!(", {} witness(es)", o.witnesses.len()));
            }
            d
        } else {
            let cases: u64 = c.laws.iter().map(|l| l.cases).sum();
            let exhaustive = c.laws.iter().all(|l| l.exhaustive);
            format!(
                "{} law(s), {cases} cases, {}",
                c.laws.len(),
                if exhaustive { "exhaustive" } else { "sampled" }
            )
        };
        rows.push(vec![status.to_string(), c.name.clone(), detail]);
    }
    s.push_str(&table(&rows, ""));
    let failures: Vec<_> = r
        .checks
        .iter()
        .filter(|c| c.status == CheckStatus::Fail)
        .collect();
    if !failures.is_empty() {
        s.push_str("\ncounter-examples\n");
        for c in failures {
            for l in c.laws.iter().filter(|l| !l.passed) {
                s.push_str(&format!(
                    "  {}: {}\n",
                    l.law,
                    l.counter_example.as_deref().unwrap_or("")
                ));
            }
            if let Some(o) = &c.oracle {
                for w in o.witnesses.iter().take(3) {
                    s.push_str(&format!(
                        "  {}: {} from {}: {} vs {}",
                        c.name, w.policy_seq, w.state, w.left, w.right
                    ));
                    if let Some(b) = &w.better {
                        s.push_str(&format!(" (beaten by {b})"));
                    }
                    s.push('\n');
                }
                if o.witnesses.len() > 3 {
                    s.push_str(&format!(
                        "  {}: ... {} more\n",
                        c.name,
                        o.witnesses.len() - 3
                    ));
                }
            }
        }
    }
    if r.harness_defect {
        s.push_str("\nHARNESS DEFECT: the conditions passed but val and val' disagree\n");
    }
    s.push_str(&format!("\nverdict: {}\n", r.verdict));
    s
}

pub fn cmd_verify(
    file: &Path,
    range: Range,
    budget: u64,
    seed: u64,
    format: Format,
) -> CliResult<Output> {
    let spec = parse_problem_file(file)?;
    let (t, n) = range.resolve(&spec)?;
    let report = run_verification(&spec, t, n, budget, seed)?;
    let stdout = match format {
        Format::Json => json_out(&report),
        Format::Text => render_verification(&report),
    };
    Ok(Output {
        code: if report.certified {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        },
        stdout,
    })
}

// ---------------------------------------------------------------- trajectories

fn read_policy_file(path: &Path, spec: &ValidSpec, t: usize) -> CliResult<PolicySeq> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read policy file {}: {e}", path.display())))?;
    let doc: Vec<IndexMap<String, String>> = serde_json::from_str(&text).map_err(|e| {
        CliError::Usage(format!(
            "{}: expected an array of state-to-control maps: {e}",
            path.display()
        ))
    })?;
    let mut policies = Vec::new();
    for (i, choice) in doc.into_iter().enumerate() {
        let p = Policy::new(t + i, choice);
        spec.check_range(t, i + 1)?;
        p.check(spec)?;
        policies.push(p);
    }
    Ok(PolicySeq::new(t, policies)?)
}

#[derive(Serialize)]
struct TrajectoryLine {
    trajectory: String,
    pairs: Vec<(String, String)>,
    final_state: String,
    sum: Json,
    #[serde(skip_serializing_if = "Option::is_none")]
    weight: Option<Json>,
}

#[derive(Serialize)]
struct TrajectoryRun {
    policy_seq: Vec<Json>,
    state: String,
    trajectories: Vec<TrajectoryLine>,
    measured: Json,
}

fn trajectory_run(
    spec: &ValidSpec,
    ps: &PolicySeq,
    x: &str,
) -> CliResult<(TrajectoryRun, Vec<Value>)> {
    let all = trj(spec, ps, x)?;
    let weights: Vec<Option<Value>> = match &all {
        MStruct::Stoch(entries) => entries.iter().map(|(_, w)| Some(w.clone())).collect(),
        _ => vec![None; all.len()],
    };
    let mut lines = Vec::new();
    let mut sums = Vec::new();
    for (traj, w) in all.values().zip(weights) {
        let sum = sum_r(spec, traj)?;
        lines.push(TrajectoryLine {
            trajectory: traj.to_string(),
            pairs: traj.pairs.clone(),
            final_state: traj.final_state.clone(),
            sum: value_to_json(&sum),
            weight: w.as_ref().map(value_to_json),
        });
        sums.push(sum);
    }
    let measured = val_prime(spec, ps, x)?;
    Ok((
        TrajectoryRun {
            policy_seq: ps.policies.iter().map(policy_json).collect(),
            state: x.to_string(),
            trajectories: lines,
            measured: value_to_json(&measured),
        },
        sums,
    ))
}

pub fn cmd_trajectories(
    file: &Path,
    range: Range,
    state: Option<&str>,
    policy: &PolicyArg,
    format: Format,
) -> CliResult<Output> {
    let spec = parse_problem_file(file)?;
    let (t, seqs) = match policy {
        PolicyArg::Optimal => {
            let (t, n) = range.resolve(&spec)?;
            (t, vec![bi(&spec, t, n)?])
        }
        PolicyArg::All => {
            let (t, n) = range.resolve(&spec)?;
            (
                t,
                enumerate_policy_seqs(&spec, t, n, DEFAULT_ENUMERATION_CAP)?,
            )
        }
        PolicyArg::File(path) => {
            let t = range.step.unwrap_or(spec.start_step);
            let ps = read_policy_file(path, &spec, t)?;
            if let Some(n) = range.horizon {
                if n != ps.len() {
                    return Err(CliError::Usage(format!(
                        "--horizon {n} but the policy file has {} step(s)",
                        ps.len()
                    )));
                }
            }
            (t, vec![ps])
        }
    };
    let states: Vec<String> = match state {
        Some(x) => {
            if !spec.has_state(t, x)? {
                return Err(CliError::Usage(format!("`{x}` is not a state at step {t}")));
            }
            vec![x.to_string()]
        }
        None => spec.states(t)?.to_vec(),
    };
    let mut runs = Vec::new();
    for ps in &seqs {
        for x in &states {
            runs.push((ps, trajectory_run(&spec, ps, x)?));
        }
    }
    let stdout = match format {
        Format::Json => {
            let doc = json!({
                "problem": spec.name,
                "step": t,
                "runs": runs.iter().map(|(_, (run, _))| run).collect::<Vec<_>>(),
            });
            json_out(&doc)
        }
        Format::Text => {
            let mut s = format!("{}\n", header(&spec));
            for (ps, (run, _)) in &runs {
                s.push_str(&format!("\npolicy {ps}, from {}\n", show_state(&run.state)));
                let rows: Vec<Vec<String>> = run
                    .trajectories
                    .iter()
                    .map(|l| {
                        let mut row =
                            vec![l.trajectory.clone(), format!("sum {}", json_number(&l.sum))];
                        if let Some(w) = &l.weight {
                            row.push(format!("weight {}", json_number(w)));
                        }
                        row
                    })
                    .collect();
                s.push_str(&table(&rows, "  "));
                s.push_str(&format!(
                    "  measured total reward: {}\n",
                    json_number(&run.measured)
                ));
            }
            s
        }
    };
    Ok(Output::ok(stdout))
}

fn json_number(v: &Json) -> String {
    match v {
        Json::String(s) => s.clone(),
        Json::Number(n) => match n.as_f64() {
            Some(f) if !n.is_i64() && !n.is_u64() => monadic_sdp::value::format_sig(f, 9),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

// ---------------------------------------------------------------- oracle

fn render_oracle(r: &OracleReport) -> String {
    let mut s = format!(
        "{}: {} ({} sequences, {} pairs)\n",
        r.check,
        if r.passed { "PASS" } else { "FAIL" },
        r.sequences,
        r.pairs
    );
    for w in &r.witnesses {
        s.push_str(&format!(
            "  {} from {}: {} vs {}",
            w.policy_seq,
            show_state(&w.state),
            w.left,
            w.right
        ));
        if let Some(b) = &w.better {
            s.push_str(&format!(" (beaten by {b})"));
        }
        s.push('\n');
    }
    s
}

pub fn cmd_oracle(
    file: &Path,
    range: Range,
    check: OracleCheck,
    value_fn: ValueFnArg,
    format: Format,
) -> CliResult<Output> {
    let spec = parse_problem_file(file)?;
    let (t, n) = range.resolve(&spec)?;
    let cap = DEFAULT_ENUMERATION_CAP;
    let reports = match check {
        OracleCheck::Equivalence => vec![check_val_equivalence(&spec, t, n, cap)?],
        OracleCheck::Bellman => vec![check_bellman(&spec, t, n, cap)?],
        OracleCheck::Optimality => {
            let ps = bi(&spec, t, n)?;
            [ValueFn::Val, ValueFn::ValPrime]
                .into_iter()
                .filter(|f| value_fn.wants(*f))
                .map(|f| check_optimality(&spec, &ps, f, cap))
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    let passed = reports.iter().all(|r| r.passed);
    let stdout = match format {
        Format::Json => {
            json_out(&json!({"problem": spec.name, "step": t, "horizon": n, "reports": reports}))
        }
        Format::Text => reports.iter().map(render_oracle).collect(),
    };
    Ok(Output {
        code: if passed { EXIT_OK } else { EXIT_CHECK_FAILED },
        stdout,
    })
}

// ---------------------------------------------------------------- example

pub fn cmd_example(name: ExampleName, measure: &str) -> CliResult<Output> {
    let spec = match name {
        ExampleName::Climate => climate_spec(measure)?,
        ExampleName::StochasticClimate => stochastic_climate_spec(),
        ExampleName::Scheduling => scheduling_spec(),
    };
    Ok(Output::ok(json_out(&to_problem_file(&spec)?)))
}
