//! Problem files: a JSON encoding of a decision problem.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "name": "climate-min",
//!   "uncertainty": "nondet",
//!   "value": { "carrier": "int", "plus": "add", "zero": 0 },
//!   "measure": "min",
//!   "start_step": 0,
//!   "horizon": 3,
//!   "steps": [
//!     { "states": ["Good", "Bad"],
//!       "controls": { "Good": ["High", "Low"], ... },
//!       "next": { "Good": { "High": ["Good", "Bad"], ... } },
//!       "reward": { "Good": { "High": { "Good": 2, "Bad": 0 } } } },
//!     ...,
//!     { "states": ["Good", "Bad"] }
//!   ]
//! }
//! ```
//!
//! Outcomes are a single state (`identity`), an array of states (`nondet`)
//! or an array of `[state, weight]` pairs (`stoch`). Numbers may be written
//! as JSON numbers or as strings; strings such as `"0.8"` or `"4/5"` are
//! read exactly in the exact carriers.

use std::fs;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use serde_json::{json, Map, Value as Json};
use thiserror::Error;

use monadic_sdp::algebra::{BinOp, ValueAlgebra};
use monadic_sdp::measures::{monoid_fold_measure, Measure, MeasureDef, MonoidSpec};
use monadic_sdp::sdp::{SdpSpec, StepTable, ValidSpec, ValidationReport, Violation, ViolationKind};
use monadic_sdp::uncertainty::{MStruct, UncertaintyKind};
use monadic_sdp::value::{Carrier, Value};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("problem failed validation:\n{}", render_violations(.0))]
    Invalid(Vec<LocatedViolation>),
    #[error("cannot encode problem: {0}")]
    Encode(String),
}

/// A validation violation together with the JSON pointer of its entry.
#[derive(Debug, Clone)]
pub struct LocatedViolation {
    pub pointer: String,
    pub violation: Violation,
}

fn render_violations(vs: &[LocatedViolation]) -> String {
    vs.iter()
        .map(|v| format!("  {}: {}", v.pointer, v.violation))
        .collect::<Vec<_>>()
        .join("\n")
}

type PResult<T> = Result<T, ProblemError>;

fn escape(token: &str) -> String {
    token.replace('~', "~0").replace('/', "~1")
}

/// A location in the document, rendered as a JSON pointer.
#[derive(Clone)]
struct Ptr(String);

impl Ptr {
    fn root() -> Self {
        Ptr(String::new())
    }

    fn key(&self, k: &str) -> Ptr {
        Ptr(format!("{}/{}", self.0, escape(k)))
    }

    fn idx(&self, i: usize) -> Ptr {
        Ptr(format!("{}/{i}", self.0))
    }

    fn err<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ProblemError::Schema {
            pointer: if self.0.is_empty() {
                "/".to_string()
            } else {
                self.0.clone()
            },
            message: message.into(),
        })
    }
}

fn object<'a>(v: &'a Json, at: &Ptr) -> PResult<&'a Map<String, Json>> {
    v.as_object()
        .map_or_else(|| at.err("expected an object"), Ok)
}

fn array<'a>(v: &'a Json, at: &Ptr) -> PResult<&'a Vec<Json>> {
    v.as_array().map_or_else(|| at.err("expected an array"), Ok)
}

fn string<'a>(v: &'a Json, at: &Ptr) -> PResult<&'a str> {
    v.as_str().map_or_else(|| at.err("expected a string"), Ok)
}

fn natural(v: &Json, at: &Ptr) -> PResult<usize> {
    v.as_u64().map_or_else(
        || at.err("expected a non-negative integer"),
        |n| Ok(n as usize),
    )
}

fn field<'a>(obj: &'a Map<String, Json>, key: &str, at: &Ptr) -> PResult<&'a Json> {
    obj.get(key)
        .map_or_else(|| at.err(format!("missing key `{key}`")), Ok)
}

fn reject_unknown(obj: &Map<String, Json>, allowed: &[&str], at: &Ptr) -> PResult<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => at.key(k).err(format!(
            "unknown key (expected one of {})",
            allowed.join(", ")
        )),
        None => Ok(()),
    }
}

fn number(v: &Json, carrier: Carrier, at: &Ptr) -> PResult<Value> {
    let text = match v {
        Json::Number(n) => n.to_string(),
        Json::String(s) => s.clone(),
        _ => return at.err("expected a number or a numeric string"),
    };
    carrier.parse(&text).or_else(|e| at.err(e.to_string()))
}

fn strings(v: &Json, at: &Ptr) -> PResult<Vec<String>> {
    array(v, at)?
        .iter()
        .enumerate()
        .map(|(i, s)| string(s, &at.idx(i)).map(str::to_string))
        .collect()
}

fn weight_carrier(carrier: Carrier) -> Carrier {
    match carrier {
        Carrier::Float => Carrier::Float,
        _ => Carrier::Rational,
    }
}

fn outcome(
    v: &Json,
    kind: UncertaintyKind,
    carrier: Carrier,
    at: &Ptr,
) -> PResult<MStruct<String>> {
    match kind {
        UncertaintyKind::Identity => Ok(MStruct::Identity(string(v, at)?.to_string())),
        UncertaintyKind::NonDet => Ok(MStruct::NonDet(strings(v, at)?)),
        UncertaintyKind::Stoch => {
            let mut out = Vec::new();
            for (i, pair) in array(v, at)?.iter().enumerate() {
                let at = at.idx(i);
                match pair.as_array().map(Vec::as_slice) {
                    Some([x, w]) => out.push((
                        string(x, &at.idx(0))?.to_string(),
                        number(w, weight_carrier(carrier), &at.idx(1))?,
                    )),
                    _ => return at.err("expected a [state, weight] pair"),
                }
            }
            Ok(MStruct::Stoch(out))
        }
    }
}

fn measure(v: &Json, alg: &ValueAlgebra, at: &Ptr) -> PResult<Measure> {
    match v {
        Json::String(name) => {
            let def: MeasureDef = name.parse().or_else(|_| {
                at.err(format!(
                    "unknown measure (expected one of {} or a monoid_fold object)",
                    MeasureDef::CATALOG.join(", ")
                ))
            })?;
            Measure::new(def, alg.carrier).or_else(|e| at.err(e.to_string()))
        }
        Json::Object(obj) => {
            reject_unknown(obj, &["monoid_fold"], at)?;
            let at = at.key("monoid_fold");
            let m = object(field(obj, "monoid_fold", &at)?, &at)?;
            reject_unknown(m, &["odot", "neutr"], &at)?;
            let odot_at = at.key("odot");
            let odot = BinOp::from_name(string(field(m, "odot", &at)?, &odot_at)?)
                .map_or_else(|| odot_at.err("expected one of add, mul, max, min"), Ok)?;
            let neutr = number(field(m, "neutr", &at)?, alg.carrier, &at.key("neutr"))?;
            Ok(monoid_fold_measure(MonoidSpec { odot, neutr }, alg.carrier))
        }
        _ => at.err("expected a measure name or a monoid_fold object"),
    }
}

fn algebra(v: &Json, at: &Ptr) -> PResult<ValueAlgebra> {
    let obj = object(v, at)?;
    reject_unknown(obj, &["carrier", "plus", "zero", "eq_tolerance"], at)?;
    let carrier_at = at.key("carrier");
    let carrier: Carrier = string(field(obj, "carrier", at)?, &carrier_at)?
        .parse()
        .or_else(|e: monadic_sdp::error::ValueError| carrier_at.err(e.to_string()))?;
    let plus_at = at.key("plus");
    let plus = match string(field(obj, "plus", at)?, &plus_at)? {
        "add" => BinOp::Add,
        "mul" => BinOp::Mul,
        _ => return plus_at.err("expected `add` or `mul`"),
    };
    let mut alg = ValueAlgebra::numeric(carrier, plus);
    if let Some(z) = obj.get("zero") {
        alg = alg.with_zero(number(z, carrier, &at.key("zero"))?);
    }
    if let Some(tol) = obj.get("eq_tolerance") {
        let tol_at = at.key("eq_tolerance");
        let t = tol
            .as_f64()
            .filter(|t| *t >= 0.0)
            .map_or_else(|| tol_at.err("expected a non-negative number"), Ok)?;
        alg = alg.with_tolerance(t);
    }
    Ok(alg)
}

fn step_table(
    v: &Json,
    kind: UncertaintyKind,
    carrier: Carrier,
    terminal: bool,
    at: &Ptr,
) -> PResult<StepTable> {
    let obj = object(v, at)?;
    if terminal {
        reject_unknown(obj, &["states"], at)?;
    } else {
        reject_unknown(obj, &["states", "controls", "next", "reward"], at)?;
    }
    let mut step = StepTable {
        states: strings(field(obj, "states", at)?, &at.key("states"))?,
        ..Default::default()
    };
    if terminal {
        return Ok(step);
    }
    let c_at = at.key("controls");
    for (x, ys) in object(field(obj, "controls", at)?, &c_at)? {
        step.controls.insert(x.clone(), strings(ys, &c_at.key(x))?);
    }
    let n_at = at.key("next");
    for (x, by_control) in object(field(obj, "next", at)?, &n_at)? {
        let x_at = n_at.key(x);
        let entry = step.next.entry(x.clone()).or_default();
        for (y, out) in object(by_control, &x_at)? {
            entry.insert(y.clone(), outcome(out, kind, carrier, &x_at.key(y))?);
        }
    }
    let r_at = at.key("reward");
    for (x, by_control) in object(field(obj, "reward", at)?, &r_at)? {
        let x_at = r_at.key(x);
        let entry = step.reward.entry(x.clone()).or_default();
        for (y, by_next) in object(by_control, &x_at)? {
            let y_at = x_at.key(y);
            let rewards = entry.entry(y.clone()).or_default();
            for (x2, r) in object(by_next, &y_at)? {
                rewards.insert(x2.clone(), number(r, carrier, &y_at.key(x2))?);
            }
        }
    }
    Ok(step)
}

/// Decodes a problem document without validating the problem itself.
pub fn decode_problem(doc: &Json) -> PResult<SdpSpec> {
    let root = Ptr::root();
    let obj = object(doc, &root)?;
    reject_unknown(
        obj,
        &[
            "schema_version",
            "name",
            "uncertainty",
            "value",
            "measure",
            "start_step",
            "horizon",
            "states_are_action_sequences",
            "steps",
        ],
        &root,
    )?;
    let version_at = root.key("schema_version");
    match field(obj, "schema_version", &root)?.as_u64() {
        Some(SCHEMA_VERSION) => {}
        _ => {
            return version_at.err(format!(
                "unsupported schema version (expected {SCHEMA_VERSION})"
            ))
        }
    }
    let name = string(field(obj, "name", &root)?, &root.key("name"))?.to_string();
    let kind_at = root.key("uncertainty");
    let kind = UncertaintyKind::from_name(string(field(obj, "uncertainty", &root)?, &kind_at)?)
        .map_or_else(
            || kind_at.err("expected one of identity, nondet, stoch"),
            Ok,
        )?;
    let alg = algebra(field(obj, "value", &root)?, &root.key("value"))?;
    let meas = measure(field(obj, "measure", &root)?, &alg, &root.key("measure"))?;
    let start_step = natural(field(obj, "start_step", &root)?, &root.key("start_step"))?;
    let horizon = natural(field(obj, "horizon", &root)?, &root.key("horizon"))?;
    let action_sequence_states = match obj.get("states_are_action_sequences") {
        None => false,
        Some(b) => b.as_bool().map_or_else(
            || {
                root.key("states_are_action_sequences")
                    .err("expected a boolean")
            },
            Ok,
        )?,
    };
    let steps_at = root.key("steps");
    let raw_steps = array(field(obj, "steps", &root)?, &steps_at)?;
    if raw_steps.len() != horizon + 1 {
        return steps_at.err(format!(
            "expected {} step tables (horizon + 1), found {}",
            horizon + 1,
            raw_steps.len()
        ));
    }
    let steps = raw_steps
        .iter()
        .enumerate()
        .map(|(i, s)| step_table(s, kind, alg.carrier, i == horizon, &steps_at.idx(i)))
        .collect::<PResult<Vec<_>>>()?;
    Ok(SdpSpec {
        name,
        kind,
        alg,
        measure: meas,
        start_step,
        horizon,
        steps,
        action_sequence_states,
    })
}

/// JSON pointer of the table entry a violation refers to.
pub fn violation_pointer(spec: &SdpSpec, v: &Violation) -> String {
    use ViolationKind::*;
    let base = Ptr::root();
    if matches!(v.kind, StepCount) {
        return base.key("steps").0;
    }
    if matches!(v.kind, MeasureKind) {
        return base.key("measure").0;
    }
    let step = base.key("steps").idx(v.t.saturating_sub(spec.start_step));
    let table = match v.kind {
        DuplicateState => "states",
        MissingControls | EmptyControls | UnknownState | Admissibility => "controls",
        MissingReward => "reward",
        CarrierMismatch if v.next.is_some() => "reward",
        CarrierMismatch => return base.key("value").key("zero").0,
        _ => "next",
    };
    let mut p = step.key(table);
    if v.kind == DuplicateState {
        return p.0;
    }
    for part in [&v.state, &v.control].into_iter().flatten() {
        p = p.key(part);
    }
    if v.kind == MissingReward {
        if let Some(x2) = &v.next {
            p = p.key(x2);
        }
    }
    p.0
}

fn located(spec: &SdpSpec, report: ValidationReport) -> ProblemError {
    ProblemError::Invalid(
        report
            .violations
            .into_iter()
            .map(|v| LocatedViolation {
                pointer: violation_pointer(spec, &v),
                violation: v,
            })
            .collect(),
    )
}

/// Parses and validates a problem document held in a string.
pub fn parse_problem_str(text: &str) -> PResult<ValidSpec> {
    let doc: Json = serde_json::from_str(text)?;
    let spec = decode_problem(&doc)?;
    let report = spec.validate();
    if !report.is_valid() {
        return Err(located(&spec, report));
    }
    Ok(spec.validated().expect("validated above"))
}

pub fn parse_problem_file(path: &Path) -> PResult<ValidSpec> {
    let text = fs::read_to_string(path).map_err(|source| ProblemError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_problem_str(&text)
}

/// Integers and integral rationals as JSON numbers, other rationals as
/// `"p/q"` strings, floats as numbers.
pub fn value_to_json(v: &Value) -> Json {
    match v {
        Value::Int(n) => json!(n),
        Value::Float(f) => json!(f),
        Value::Rat(r) if r.is_integer() => match i64::try_from(r.to_integer()) {
            Ok(n) => json!(n),
            Err(_) => json!(v.to_string()),
        },
        Value::Rat(_) => json!(v.to_string()),
    }
}

fn encode_measure(m: &Measure) -> PResult<Json> {
    match &m.def {
        MeasureDef::MonoidFold(spec) => match spec.odot {
            BinOp::Custom(..) => Err(ProblemError::Encode(format!(
                "custom operation `{}`",
                spec.odot.name()
            ))),
            _ => Ok(
                json!({"monoid_fold": {"odot": spec.odot.name(), "neutr": value_to_json(&spec.neutr)}}),
            ),
        },
        MeasureDef::Custom(name, ..) => {
            Err(ProblemError::Encode(format!("custom measure `{name}`")))
        }
        def => Ok(json!(def.name())),
    }
}

fn encode_outcome(mx: &MStruct<String>) -> Json {
    match mx {
        MStruct::Identity(x) => json!(x),
        MStruct::NonDet(xs) => json!(xs),
        MStruct::Stoch(xs) => Json::Array(
            xs.iter()
                .map(|(x, w)| json!([x, value_to_json(w)]))
                .collect(),
        ),
    }
}

/// Encodes a problem as a problem document. Custom operations, orders and
/// measures have no file representation.
pub fn to_problem_file(spec: &SdpSpec) -> PResult<Json> {
    if !matches!(spec.alg.plus, BinOp::Add | BinOp::Mul) {
        return Err(ProblemError::Encode(format!(
            "combination operator `{}`",
            spec.alg.plus.name()
        )));
    }
    if spec.alg.leq.name() != "numeric" {
        return Err(ProblemError::Encode(format!(
            "preorder `{}`",
            spec.alg.leq.name()
        )));
    }
    let mut value = Map::new();
    value.insert("carrier".into(), json!(spec.alg.carrier.name()));
    value.insert("plus".into(), json!(spec.alg.plus.name()));
    value.insert("zero".into(), value_to_json(&spec.alg.zero));
    if !spec.alg.carrier.is_exact() {
        value.insert("eq_tolerance".into(), json!(spec.alg.eq_tolerance));
    }
    let mut steps = Vec::new();
    for (i, step) in spec.steps.iter().enumerate() {
        if i == spec.horizon {
            steps.push(json!({"states": step.states}));
            continue;
        }
        let next: IndexMap<&String, IndexMap<&String, Json>> = step
            .next
            .iter()
            .map(|(x, m)| (x, m.iter().map(|(y, mx)| (y, encode_outcome(mx))).collect()))
            .collect();
        let reward: IndexMap<&String, IndexMap<&String, IndexMap<&String, Json>>> = step
            .reward
            .iter()
            .map(|(x, m)| {
                (
                    x,
                    m.iter()
                        .map(|(y, r)| (y, r.iter().map(|(x2, v)| (x2, value_to_json(v))).collect()))
                        .collect(),
                )
            })
            .collect();
        steps.push(json!({
            "states": step.states,
            "controls": step.controls,
            "next": next,
            "reward": reward,
        }));
    }
    let mut doc = Map::new();
    doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
    doc.insert("name".into(), json!(spec.name));
    doc.insert("uncertainty".into(), json!(spec.kind.name()));
    doc.insert("value".into(), Json::Object(value));
    doc.insert("measure".into(), encode_measure(&spec.measure)?);
    doc.insert("start_step".into(), json!(spec.start_step));
    doc.insert("horizon".into(), json!(spec.horizon));
    if spec.action_sequence_states {
        doc.insert("states_are_action_sequences".into(), json!(true));
    }
    doc.insert("steps".into(), Json::Array(steps));
    Ok(Json::Object(doc))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = r#"{
        "schema_version": 1, "name": "tiny", "uncertainty": "stoch",
        "value": {"carrier": "rational", "plus": "add", "zero": 0},
        "measure": "expected", "start_step": 0, "horizon": 1,
        "steps": [
            {"states": ["a"], "controls": {"a": ["go"]},
             "next": {"a": {"go": [["b", "0.8"], ["c", "1/5"]]}},
             "reward": {"a": {"go": {"b": 1, "c": "1/2"}}}},
            {"states": ["b", "c"]}
        ]}"#;

    #[test]
    fn weights_are_read_exactly() {
        let spec = parse_problem_str(TINY).unwrap();
        assert_eq!(
            spec.next(0, "a", "go").unwrap(),
            &MStruct::Stoch(vec![
                ("b".into(), Value::rational(4, 5)),
                ("c".into(), Value::rational(1, 5))
            ])
        );
        assert_eq!(
            spec.reward(0, "a", "go", "c").unwrap(),
            &Value::rational(1, 2)
        );
    }

    #[test]
    fn schema_errors_carry_pointers() {
        let bad = TINY.replace("\"go\": [[\"b\", \"0.8\"]", "\"go\": [[\"b\"]");
        let err = parse_problem_str(&bad).unwrap_err().to_string();
        assert!(err.starts_with("/steps/0/next/a/go/0:"), "{err}");

        let bad = TINY.replace("\"plus\": \"add\"", "\"plus\": \"max\"");
        let err = parse_problem_str(&bad).unwrap_err().to_string();
        assert!(err.starts_with("/value/plus:"), "{err}");

        let bad = TINY.replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(parse_problem_str(&bad)
            .unwrap_err()
            .to_string()
            .starts_with("/schema_version"));

        let bad = TINY.replace("\"horizon\": 1", "\"horizon\": 1, \"extra\": true");
        assert!(parse_problem_str(&bad)
            .unwrap_err()
            .to_string()
            .starts_with("/extra"));
    }

    #[test]
    fn validation_errors_name_the_entry() {
        let bad = TINY.replace(", \"c\": \"1/2\"", "");
        match parse_problem_str(&bad).unwrap_err() {
            ProblemError::Invalid(vs) => {
                assert_eq!(vs.len(), 1);
                assert_eq!(vs[0].pointer, "/steps/0/reward/a/go/c");
                assert_eq!(vs[0].violation.kind, ViolationKind::MissingReward);
            }
            e => panic!("{e}"),
        }
        let bad = TINY.replace("\"1/5\"", "\"1/10\"");
        match parse_problem_str(&bad).unwrap_err() {
            ProblemError::Invalid(vs) => {
                assert_eq!(vs[0].violation.kind, ViolationKind::WeightSum);
                assert_eq!(vs[0].pointer, "/steps/0/next/a/go");
                assert!(vs[0].violation.message.contains("9/10"));
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn pointer_tokens_are_escaped() {
        assert_eq!(Ptr::root().key("a/b").key("c~d").0, "/a~1b/c~0d");
    }

    #[test]
    fn encoding_round_trips() {
        let spec = parse_problem_str(TINY).unwrap().into_inner();
        let doc = to_problem_file(&spec).unwrap();
        assert_eq!(decode_problem(&doc).unwrap(), spec);
        assert_eq!(doc["steps"][0]["reward"]["a"]["go"]["c"], json!("1/2"));
    }
}
