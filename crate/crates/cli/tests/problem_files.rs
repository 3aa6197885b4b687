mod common;

use std::fs;

use common::{assert_schema, problem};
use monadic_sdp::examples::{climate_spec, scheduling_spec, stochastic_climate_spec};
use monadic_sdp::sdp::{SdpSpec, ViolationKind};
use monadic_sdp_cli::problem::{
    decode_problem, parse_problem_file, parse_problem_str, to_problem_file, ProblemError,
};
use serde_json::Value as Json;

fn shipped() -> Vec<(&'static str, SdpSpec)> {
    vec![
        ("climate.json", climate_spec("min").unwrap()),
        ("climate_sum.json", climate_spec("sum").unwrap()),
        ("climate_max.json", climate_spec("max").unwrap()),
        ("scheduling.json", scheduling_spec()),
        ("stochastic_climate.json", stochastic_climate_spec()),
    ]
}

#[test]
fn shipped_files_parse_to_the_built_in_problems() {
    for (file, spec) in shipped() {
        let parsed = parse_problem_file(&problem(file)).unwrap();
        assert_eq!(parsed.into_inner(), spec, "{file}");
    }
}

#[test]
fn built_in_problems_round_trip() {
    for (file, spec) in shipped() {
        let doc = to_problem_file(&spec).unwrap();
        assert_eq!(decode_problem(&doc).unwrap(), spec, "{file}");
        let text = serde_json::to_string(&doc).unwrap();
        assert_eq!(
            parse_problem_str(&text).unwrap().into_inner(),
            spec,
            "{file}"
        );
    }
}

#[test]
fn shipped_files_match_the_schema() {
    for (file, _) in shipped() {
        let doc: Json = serde_json::from_str(&fs::read_to_string(problem(file)).unwrap()).unwrap();
        assert_schema("problem.schema.json", &doc);
    }
}

fn climate_doc() -> Json {
    serde_json::from_str(&fs::read_to_string(problem("climate.json")).unwrap()).unwrap()
}

fn violations(doc: &Json) -> Vec<(ViolationKind, String)> {
    match parse_problem_str(&doc.to_string()) {
        Err(ProblemError::Invalid(vs)) => vs
            .into_iter()
            .map(|v| (v.violation.kind, v.pointer))
            .collect(),
        other => panic!("expected a validation error, got {other:?}"),
    }
}

#[test]
fn missing_reward_is_located() {
    let mut doc = climate_doc();
    doc["steps"][1]["reward"]["Bad"]["Low"]
        .as_object_mut()
        .unwrap()
        .remove("Good");
    assert_eq!(
        violations(&doc),
        [(
            ViolationKind::MissingReward,
            "/steps/1/reward/Bad/Low/Good".to_string()
        )]
    );
    let msg = parse_problem_str(&doc.to_string()).unwrap_err().to_string();
    assert!(
        msg.contains("(1, Bad, Low, Good)") || msg.contains("t=1, Bad, Low, Good"),
        "{msg}"
    );
}

#[test]
fn weight_sums_are_checked() {
    let mut doc: Json =
        serde_json::from_str(&fs::read_to_string(problem("stochastic_climate.json")).unwrap())
            .unwrap();
    doc["steps"][0]["next"]["Good"]["High"][1][1] = Json::from("1/10");
    let vs = violations(&doc);
    assert_eq!(
        vs,
        [(
            ViolationKind::WeightSum,
            "/steps/0/next/Good/High".to_string()
        )]
    );
}

#[test]
fn empty_transitions_and_unknown_states_are_reported() {
    let mut doc = climate_doc();
    doc["steps"][2]["next"]["Good"]["High"] = Json::Array(vec![]);
    doc["steps"][0]["next"]["Bad"]["Low"] = serde_json::json!(["Good", "Ugly"]);
    let kinds: Vec<ViolationKind> = violations(&doc).into_iter().map(|v| v.0).collect();
    assert!(kinds.contains(&ViolationKind::NextNotEmpty));
    assert!(kinds.contains(&ViolationKind::NotAState));
    assert!(kinds.contains(&ViolationKind::MissingReward));
}

#[test]
fn schema_errors_are_located() {
    let mut doc = climate_doc();
    doc["steps"][0]["reward"]["Good"]["High"]["Good"] = Json::from("two");
    let err = parse_problem_str(&doc.to_string()).unwrap_err().to_string();
    assert!(err.starts_with("/steps/0/reward/Good/High/Good:"), "{err}");

    let mut doc = climate_doc();
    doc["measure"] = Json::from("median");
    let err = parse_problem_str(&doc.to_string()).unwrap_err().to_string();
    assert!(err.starts_with("/measure:"), "{err}");

    let mut doc = climate_doc();
    doc["measure"] = Json::from("avg");
    assert!(parse_problem_str(&doc.to_string())
        .unwrap_err()
        .to_string()
        .contains("division"));

    assert!(matches!(parse_problem_str("{"), Err(ProblemError::Json(_))));
    assert!(matches!(
        parse_problem_file(std::path::Path::new("/nonexistent/problem.json")),
        Err(ProblemError::Io { .. })
    ));
}

#[test]
fn monoid_fold_measures_round_trip() {
    let mut doc = climate_doc();
    doc["measure"] = serde_json::json!({"monoid_fold": {"odot": "max", "neutr": 0}});
    let spec = parse_problem_str(&doc.to_string()).unwrap().into_inner();
    assert_eq!(to_problem_file(&spec).unwrap()["measure"], doc["measure"]);
    assert_schema("problem.schema.json", &doc);
}
