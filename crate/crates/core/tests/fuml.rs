mod common;

use common::*;
use mashup_core::composer::WovenModel;
use mashup_core::gen::{action_count, element_count, recursive_model};
use mashup_core::pipeline::{execute, load_language};
use mashup_core::runtime::{load_model, ContractPolicy, Fault, ModelInstance, Trace};

fn fuml() -> WovenModel {
    load_language(&fixture("examples/fuml-lite/fuml.mashup")).unwrap().woven
}

fn model(w: &WovenModel, rel: &str) -> ModelInstance {
    load_model(&read(&fixture(rel)), w).unwrap()
}

fn run(w: &WovenModel, m: ModelInstance) -> (Trace, Result<(), Fault>) {
    execute(w, m, "Activity", "execute", ContractPolicy::PrePostOnly)
}

#[test]
fn work_session_shape() {
    let w = fuml();
    let m = model(&w, "examples/models/worksession.model");
    let count = |c: &str| m.instances_of(&w, c).count();
    assert_eq!(count("Activity"), 1);
    assert_eq!(count("ActivityNode"), 7);
    assert_eq!(count("ActivityEdge"), 7);
    assert_eq!(count("ForkNode"), 1);
    assert_eq!(count("JoinNode"), 1);
    assert_eq!(count("OpaqueAction"), 3);
}

#[test]
fn work_session_runs_each_action_once() {
    let w = fuml();
    for f in ["worksession", "worksession-reversed"] {
        let (t, r) = run(&w, model(&w, &format!("examples/models/{f}.model")));
        r.unwrap();
        let mut ex = t.executed();
        ex.sort();
        assert_eq!(ex, ["Have a coffee", "Talk", "Work"], "{f}");
    }
}

#[test]
fn join_waits_for_both_branches() {
    let w = fuml();
    let (t, r) = run(&w, model(&w, "examples/models/truncated.model"));
    r.unwrap();
    assert_eq!(t.executed(), ["Have a coffee"]);
    assert!(!t.lines().any(|l| l == "OpEnter\tfinal.run"));
}

#[test]
fn create_object_action_runs_through_super() {
    let w = fuml();
    let (t, r) = run(&w, model(&w, "examples/models/create-class.model"));
    r.unwrap();
    assert_eq!(t.executed(), ["Create person"]);
}

#[test]
fn activity_without_initial_node_fails() {
    let w = fuml();
    let m = load_model(
        r#"{"conformsTo":"fuml","objects":[{"id":"a","class":"Activity","slots":{"name":"Empty"}}],"roots":["@a"]}"#,
        &w,
    )
    .unwrap();
    let (_, r) = run(&w, m);
    assert_eq!(r, Err(Fault::Raised("activity Empty has no initial node".into())));
}

#[test]
fn generated_chains() {
    let w = fuml();
    assert_eq!((action_count(0), element_count(0)), (1, 6));
    assert_eq!((action_count(1), element_count(1)), (5, 14));
    assert_eq!(element_count(4), 686);
    for d in 0..=3 {
        let m = load_model(&recursive_model(d), &w).unwrap();
        assert_eq!(m.len() as u64, element_count(d));
        let (t, r) = run(&w, m);
        r.unwrap();
        let ex = t.executed();
        assert_eq!(ex.len() as u64, action_count(d));
        assert_eq!(ex[0], if d == 0 { "draw" } else { "turn" });
    }
}

#[test]
fn checked_in_benchmark_model_matches_the_generator() {
    assert_eq!(read(&fixture("examples/models/hilbert-d4.model")), recursive_model(4));
}

#[test]
fn pin_linearization() {
    let w = fuml();
    assert_eq!(
        w.class("Pin").unwrap().linearization,
        ["Pin", "MultiplicityElement", "ObjectNode", "ActivityNode", "Object"]
    );
    assert!(w.conforms("Pin", "MultiplicityElement"));
}
