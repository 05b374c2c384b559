mod common;

use std::path::PathBuf;

use common::*;

const FUML: &str = "examples/fuml-lite/fuml.mashup";

fn scratch(name: &str, text: &str) -> PathBuf {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn missing_manifest_exits_1() {
    let (code, _, err) = mashup(&["compose", "--manifest", "examples/nope.mashup"]);
    assert_eq!(code, 1);
    assert!(err.contains("cannot read manifest"), "{err}");
}

#[test]
fn bad_arguments_exit_1() {
    assert_eq!(mashup(&["frobnicate"]).0, 1);
    assert_eq!(
        mashup(&["bench", "--manifest", FUML, "--model", "x", "--reps", "0"]).0,
        1
    );
    assert_eq!(mashup(&["--help"]).0, 0);
}

#[test]
fn compose_summary() {
    let (code, out, _) = mashup(&["compose", "--manifest", FUML]);
    assert_eq!(code, 0);
    assert!(out.starts_with("composed fuml: 3 units, "), "{out}");
}

#[test]
fn unreadable_model_exits_1() {
    let bad = scratch("broken.model", "{ not json");
    let (code, _, _) = mashup(&["run", "--manifest", FUML, "--model", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
}

#[test]
fn nonconformant_model_exits_3() {
    let bad = scratch(
        "nonconformant.model",
        r#"{"conformsTo":"fuml","objects":[{"id":"a","class":"Activity","slots":{"name":5}}],"roots":["@a"]}"#,
    );
    let (code, _, err) = mashup(&["check", "--manifest", FUML, "--model", bad.to_str().unwrap()]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn model_without_an_activity_exits_5() {
    let m = scratch(
        "no-activity.model",
        r#"{"conformsTo":"fuml","objects":[{"id":"c","class":"Class","slots":{"name":"P"}}],"roots":["@c"]}"#,
    );
    let (code, _, err) = mashup(&["run", "--manifest", FUML, "--model", m.to_str().unwrap()]);
    assert_eq!(code, 5);
    assert!(err.contains("no root object of class `Activity`"), "{err}");
}

#[test]
fn unknown_entry_point_exits_3() {
    let (code, _, _) = mashup(&[
        "run",
        "--manifest",
        FUML,
        "--model",
        "examples/models/worksession.model",
        "--entry",
        "Activity.launch",
    ]);
    assert_eq!(code, 3);
}

#[test]
fn contract_violation_at_run_time_exits_4() {
    let args = [
        "run",
        "--manifest",
        FUML,
        "--model",
        "examples/models/create-activity.model",
    ];
    let (code, _, _) = mashup(&args);
    assert_eq!(code, 0);
    let (code, out, _) = mashup(&[&args[..], &["--contracts", "full"]].concat());
    assert_eq!(code, 4);
    assert!(out.contains("ContractViolation\tinv fUML_is_class @ create"), "{out}");
}

#[test]
fn single_rep_bench_has_equal_statistics() {
    let (code, out, err) = mashup(&[
        "bench",
        "--manifest",
        FUML,
        "--model",
        "examples/models/worksession.model",
        "--reps",
        "1",
    ]);
    assert_eq!(code, 0, "{err}");
    let get = |k: &str| out.lines().find_map(|l| l.strip_prefix(k)).unwrap().trim().to_string();
    assert_eq!(get("runs:"), "1");
    assert_eq!(get("mean:"), get("min:"));
    assert_eq!(get("min:"), get("max:"));
    assert_eq!(get("model:"), "15 elements");
}

#[test]
fn emit_to_file_matches_stdout() {
    let target = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("fuml.report");
    let (code, out, _) = mashup(&["emit", "--manifest", FUML, "--emit", target.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert_eq!(read(&target), mashup(&["emit", "--manifest", FUML]).1);
}

#[test]
fn ambiguous_diamond_fails_composition() {
    let (code, _, err) = mashup(&["compose", "--manifest", "examples/diamond/ambiguous.mashup"]);
    assert_eq!(code, 2);
    assert!(err.contains("AmbiguousMethod"), "{err}");
}
