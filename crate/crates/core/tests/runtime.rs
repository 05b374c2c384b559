mod common;

use common::*;
use mashup_core::contracts::CheckResult;
use mashup_core::expr::Value;
use mashup_core::runtime::{
    check_model, load_model, save_model, ContractPolicy, Fault, Interpreter, ModelErrorKind, ModelInstance,
};

#[test]
fn new_objects_get_default_slots() {
    let w = emof_woven();
    let mut m = ModelInstance::new(&w.package);
    let g = m.create(&w, "Group").unwrap();
    assert_eq!(m.get(g, "title").unwrap(), &Value::Str(String::new()));
    assert_eq!(m.get(g, "leader").unwrap(), &Value::Void);
    assert!(m.targets(g, "members").is_empty());
    assert_eq!(m.roots(), [g]);
    assert!(matches!(m.create(&w, "Nope"), Err(Fault::UnknownClass(_))));
}

#[test]
fn one_to_many_opposite_moves_the_item() {
    let w = emof_woven();
    let mut m = ModelInstance::new(&w.package);
    let (g1, g2, i) = (
        m.create(&w, "Group").unwrap(),
        m.create(&w, "Group").unwrap(),
        m.create(&w, "Item").unwrap(),
    );
    m.add_to_feature(&w, g1, "members", Value::Obj(i)).unwrap();
    assert_eq!(m.targets(i, "group"), [g1]);
    m.set_feature(&w, i, "group", Value::Obj(g2)).unwrap();
    assert!(m.targets(g1, "members").is_empty());
    assert_eq!(m.targets(g2, "members"), [i]);
    m.set_feature(&w, i, "group", Value::Void).unwrap();
    assert!(m.targets(g2, "members").is_empty());
}

#[test]
fn one_to_one_opposite_steals() {
    let w = emof_woven();
    let mut m = ModelInstance::new(&w.package);
    let (g1, g2, i) = (
        m.create(&w, "Group").unwrap(),
        m.create(&w, "Group").unwrap(),
        m.create(&w, "Item").unwrap(),
    );
    m.set_feature(&w, g1, "leader", Value::Obj(i)).unwrap();
    m.set_feature(&w, g2, "leader", Value::Obj(i)).unwrap();
    assert_eq!(m.get(g1, "leader").unwrap(), &Value::Void);
    assert_eq!(m.targets(i, "leads"), [g2]);
    assert!(structural_violations(&w, &m).is_empty());
}

#[test]
fn containment_reparents_and_refuses_cycles() {
    let w = emof_woven();
    let mut m = ModelInstance::new(&w.package);
    let (a, b, g) = (
        m.create(&w, "Item").unwrap(),
        m.create(&w, "Item").unwrap(),
        m.create(&w, "Group").unwrap(),
    );
    m.add_to_feature(&w, a, "sub", Value::Obj(b)).unwrap();
    assert_eq!(m.container(b), Some(a));
    assert!(!m.roots().contains(&b));
    assert!(matches!(
        m.add_to_feature(&w, b, "sub", Value::Obj(a)),
        Err(Fault::ContainmentCycle { .. })
    ));
    assert!(matches!(
        m.add_to_feature(&w, a, "sub", Value::Obj(a)),
        Err(Fault::ContainmentCycle { .. })
    ));
    m.add_to_feature(&w, g, "items", Value::Obj(b)).unwrap();
    assert_eq!(m.container(b), Some(g));
    assert!(m.targets(a, "sub").is_empty());
    m.remove_from_feature(&w, g, "items", &Value::Obj(b)).unwrap();
    assert_eq!(m.container(b), None);
    assert!(m.roots().contains(&b));
    assert!(structural_violations(&w, &m).is_empty());
}

#[test]
fn wrong_types_are_rejected() {
    let w = emof_woven();
    let mut m = ModelInstance::new(&w.package);
    let (g, p) = (m.create(&w, "Group").unwrap(), m.create(&w, "Part").unwrap());
    assert!(matches!(
        m.set_feature(&w, g, "title", Value::Int(3)),
        Err(Fault::TypeFault(_))
    ));
    assert!(matches!(
        m.add_to_feature(&w, g, "members", Value::Obj(p)),
        Err(Fault::TypeFault(_))
    ));
    assert!(matches!(
        m.set_feature(&w, g, "nope", Value::Int(3)),
        Err(Fault::UnknownFeature { .. })
    ));
}

const COUNTER: &str = "metamodel c { class Counter { attr n: Int; op bump(by: Int): Int; op twice(): Int; } }";
const COUNTER_ACT: &str = "package c; require \"c.mm\";
aspect class Counter {
  method bump(by: Int): Int is do
    self.n := self.n + by
    return self.n
  end
  method twice(): Int is do
    self.bump(1)
    return self.bump(1)
  end
}";

#[test]
fn methods_update_slots_and_trace_calls() {
    let w = woven(&[("c.mm", COUNTER), ("c.act", COUNTER_ACT)]);
    let mut m = ModelInstance::new(&w.package);
    let c = m.create(&w, "Counter").unwrap();
    let mut it = Interpreter::new(&w, m, ContractPolicy::PrePostOnly);
    assert_eq!(it.invoke(c, "twice", vec![]).unwrap(), Value::Int(2));
    assert_eq!(it.invoke(c, "bump", vec![Value::Int(5)]).unwrap(), Value::Int(7));
    let (m, trace) = it.into_parts();
    assert_eq!(m.get(c, "n").unwrap(), &Value::Int(7));
    let enters = trace.lines().filter(|l| l.starts_with("OpEnter")).count();
    assert_eq!(enters, 4);
}

#[test]
fn failing_precondition_stops_the_call() {
    let inv = "package c; require \"c.mm\"; aspect class Counter { pre positive on bump: by > 0; }";
    let w = woven(&[("c.mm", COUNTER), ("c.inv", inv), ("c.act", COUNTER_ACT)]);
    let mut m = ModelInstance::new(&w.package);
    let c = m.create(&w, "Counter").unwrap();
    let mut it = Interpreter::new(&w, m.clone(), ContractPolicy::PrePostOnly);
    let err = it.invoke(c, "bump", vec![Value::Int(0)]).unwrap_err();
    assert!(matches!(err, Fault::PreconditionViolation { ref name, .. } if name == "positive"));
    assert_eq!(it.model().get(c, "n").unwrap(), &Value::Int(0));
    assert!(it
        .trace
        .lines()
        .any(|l| l.starts_with("ContractViolation\tpre positive")));

    let mut off = Interpreter::new(&w, m, ContractPolicy::Off);
    assert_eq!(off.invoke(c, "bump", vec![Value::Int(0)]).unwrap(), Value::Int(0));
}

#[test]
fn full_policy_checks_invariants_after_calls() {
    let inv = "package c; require \"c.mm\"; aspect class Counter { inv small: self.n < 2; }";
    let w = woven(&[("c.mm", COUNTER), ("c.inv", inv), ("c.act", COUNTER_ACT)]);
    let mut m = ModelInstance::new(&w.package);
    let c = m.create(&w, "Counter").unwrap();
    let mut lax = Interpreter::new(&w, m.clone(), ContractPolicy::PrePostOnly);
    assert!(lax.invoke(c, "bump", vec![Value::Int(5)]).is_ok());
    let mut strict = Interpreter::new(&w, m, ContractPolicy::Full);
    assert!(strict.invoke(c, "bump", vec![Value::Int(1)]).is_ok());
    assert!(matches!(
        strict.invoke(c, "bump", vec![Value::Int(1)]),
        Err(Fault::InvariantViolation { .. })
    ));
}

#[test]
fn runaway_recursion_faults() {
    let act = "package c; require \"c.mm\";
      aspect class Counter { method twice(): Int is do return self.twice() end }";
    let w = woven(&[("c.mm", COUNTER), ("c.act", act)]);
    let mut m = ModelInstance::new(&w.package);
    let c = m.create(&w, "Counter").unwrap();
    let mut it = Interpreter::new(&w, m, ContractPolicy::Off);
    it.max_depth = 50;
    assert_eq!(it.invoke(c, "twice", vec![]), Err(Fault::CallDepthExceeded(50)));
}

#[test]
fn check_model_reports_each_violation() {
    let inv = "package c; require \"c.mm\"; aspect class Counter { inv nonNeg: self.n >= 0; inv small: self.n < 10; }";
    let w = woven(&[("c.mm", COUNTER), ("c.inv", inv)]);
    let mut m = ModelInstance::new(&w.package);
    let a = m.create(&w, "Counter").unwrap();
    let b = m.create(&w, "Counter").unwrap();
    m.set_feature(&w, a, "n", Value::Int(-1)).unwrap();
    m.set_feature(&w, b, "n", Value::Int(12)).unwrap();
    let bad: Vec<(String, String)> = check_model(&w, &m)
        .into_iter()
        .filter_map(|r| match r {
            CheckResult::Violated { name, obj } => Some((name, m.label(obj).to_string())),
            _ => None,
        })
        .collect();
    assert_eq!(
        bad,
        [
            ("nonNeg".to_string(), m.label(a).to_string()),
            ("small".to_string(), m.label(b).to_string())
        ]
    );
}

#[test]
fn load_derives_opposites_and_round_trips() {
    let w = emof_woven();
    let text = r#"{
      "conformsTo": "main",
      "objects": [
        { "id": "g", "class": "Group", "slots": { "title": "x", "members": ["@i"] } },
        { "id": "i", "class": "Item", "slots": { "weight": 3 } }
      ],
      "roots": ["@g", "@i"]
    }"#;
    let m = load_model(text, &w).unwrap();
    let (g, i) = (m.by_label("g").unwrap(), m.by_label("i").unwrap());
    assert_eq!(m.targets(i, "group"), [g]);
    let saved = save_model(&w, &m).unwrap();
    assert!(saved.ends_with('\n'));
    isomorphic(&m, &load_model(&saved, &w).unwrap()).unwrap();
}

#[test]
fn load_errors_are_classified() {
    let w = emof_woven();
    let kind = |t: &str| load_model(t, &w).unwrap_err().kind;
    assert_eq!(kind("{"), ModelErrorKind::Syntax);
    assert_eq!(
        kind(
            r#"{"conformsTo":"main","objects":[{"id":"g","class":"Group","slots":{"leader":"@ghost"}}],"roots":["@g"]}"#
        ),
        ModelErrorKind::Resolution
    );
    assert_eq!(
        kind(r#"{"conformsTo":"main","objects":[{"id":"g","class":"Crate","slots":{}}],"roots":["@g"]}"#),
        ModelErrorKind::Resolution
    );
    assert_eq!(
        kind(r#"{"conformsTo":"main","objects":[{"id":"g","class":"Group","slots":{"title":7}}],"roots":["@g"]}"#),
        ModelErrorKind::Conformance
    );
    assert_eq!(
        kind(r#"{"conformsTo":"other","objects":[],"roots":[]}"#),
        ModelErrorKind::Conformance
    );
}

#[test]
fn empty_model_loads() {
    let w = emof_woven();
    let m = load_model(r#"{"conformsTo":"main","objects":[],"roots":[]}"#, &w).unwrap();
    assert!(m.is_empty());
    assert!(check_model(&w, &m).is_empty());
}

#[test]
fn entry_point_needs_a_root() {
    let w = woven(&[("c.mm", COUNTER), ("c.act", COUNTER_ACT)]);
    let mut it = Interpreter::new(&w, ModelInstance::new(&w.package), ContractPolicy::Off);
    assert!(matches!(
        it.run_entry_point("Counter", "twice"),
        Err(Fault::NoEntryObject(_))
    ));
}
