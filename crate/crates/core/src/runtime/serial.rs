//! JSON model files, conformance checking and invariant checking.
//!
//! ```json
//! {"conformsTo": "fuml",
//!  "objects": [{"id": "a", "class": "Activity", "slots": {"name": "W", "node": ["@n1"]}}],
//!  "roots": ["@a"]}
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde_json::{json, Map, Value as Json};

use crate::composer::WovenModel;
use crate::contracts::{check_invariant, CheckResult};
use crate::expr::{Collection, Value};
use crate::meta::Feature;
use crate::types::{PrimitiveType, Upper};

use super::model::slot_kind;
use super::{ModelInstance, ObjId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelErrorKind {
    /// Not valid JSON or not shaped like a model file.
    Syntax,
    /// Unknown class, feature or object id.
    Resolution,
    /// Well-formed but violating types, bounds, opposites or containment.
    Conformance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelError {
    pub kind: ModelErrorKind,
    pub messages: Vec<String>,
}

impl ModelError {
    fn one(kind: ModelErrorKind, msg: impl Into<String>) -> Self {
        ModelError {
            kind,
            messages: vec![msg.into()],
        }
    }
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ModelErrorKind::Syntax => "model syntax error",
            ModelErrorKind::Resolution => "model resolution error",
            ModelErrorKind::Conformance => "conformance error",
        };
        write!(f, "{kind}: {}", self.messages.join("; "))
    }
}

impl std::error::Error for ModelError {}

fn syntax(msg: impl Into<String>) -> ModelError {
    ModelError::one(ModelErrorKind::Syntax, msg)
}

fn resolution(msg: impl Into<String>) -> ModelError {
    ModelError::one(ModelErrorKind::Resolution, msg)
}

/// Parses a model file. Opposite slots absent from the file are derived from
/// the other end; slots that are present must agree with it.
pub fn load_model(text: &str, woven: &WovenModel) -> Result<ModelInstance, ModelError> {
    let doc: Json = serde_json::from_str(text).map_err(|e| syntax(e.to_string()))?;
    let top = doc.as_object().ok_or_else(|| syntax("top level must be an object"))?;
    let conforms_to = top
        .get("conformsTo")
        .and_then(Json::as_str)
        .ok_or_else(|| syntax("missing string field `conformsTo`"))?;
    if conforms_to != woven.package {
        return Err(ModelError::one(
            ModelErrorKind::Conformance,
            format!(
                "model conforms to `{conforms_to}`, but the language is `{}`",
                woven.package
            ),
        ));
    }
    let objects = match top.get("objects") {
        Some(Json::Array(a)) => a.as_slice(),
        None => &[],
        Some(_) => return Err(syntax("`objects` must be an array")),
    };

    let mut m = ModelInstance::new(conforms_to);
    let mut pending = Vec::new();
    for o in objects {
        let o = o
            .as_object()
            .ok_or_else(|| syntax("each object must be a JSON object"))?;
        let id = o
            .get("id")
            .and_then(Json::as_str)
            .ok_or_else(|| syntax("object without string `id`"))?;
        let class = o
            .get("class")
            .and_then(Json::as_str)
            .ok_or_else(|| syntax(format!("object `{id}` has no string `class`")))?;
        if m.by_label(id).is_some() {
            return Err(syntax(format!("duplicate object id `{id}`")));
        }
        let oid = m
            .create_labeled(woven, class, id.to_string())
            .map_err(|f| resolution(format!("object `{id}`: {f}")))?;
        let slots = match o.get("slots") {
            Some(Json::Object(s)) => s.clone(),
            None => Map::new(),
            Some(_) => return Err(syntax(format!("`slots` of `{id}` must be an object"))),
        };
        pending.push((oid, slots));
    }

    // Second pass: slot values, with references resolved.
    let mut present: HashSet<(ObjId, String)> = HashSet::new();
    for (oid, slots) in &pending {
        let class = m.class_of(*oid).to_string();
        for (name, json) in slots {
            let f = woven
                .feature(&class, name)
                .ok_or_else(|| resolution(format!("class `{class}` has no feature `{name}`")))?
                .clone();
            let v = decode(&m, &f, json)
                .map_err(|e| ModelError::one(e.kind, format!("{}.{name}: {}", m.label(*oid), e.messages.join("; "))))?;
            m.obj_mut(*oid).slots.insert(name.clone(), v);
            present.insert((*oid, name.clone()));
        }
    }

    derive_opposites(&mut m, woven, &present)?;
    assign_containers(&mut m, woven)?;

    if let Some(roots) = top.get("roots") {
        let roots = roots.as_array().ok_or_else(|| syntax("`roots` must be an array"))?;
        let mut ids = Vec::new();
        for r in roots {
            let s = r
                .as_str()
                .and_then(|s| s.strip_prefix('@'))
                .ok_or_else(|| syntax("roots must be \"@id\" strings"))?;
            ids.push(
                m.by_label(s)
                    .ok_or_else(|| resolution(format!("root `@{s}` is not a declared object")))?,
            );
        }
        let expected: HashSet<ObjId> = m.roots().iter().copied().collect();
        let listed: HashSet<ObjId> = ids.iter().copied().collect();
        if expected != listed || listed.len() != ids.len() {
            return Err(ModelError::one(
                ModelErrorKind::Conformance,
                "`roots` must list exactly the objects without a container",
            ));
        }
        m.reorder_roots(ids);
    }

    let problems = conformance(woven, &m);
    if !problems.is_empty() {
        return Err(ModelError {
            kind: ModelErrorKind::Conformance,
            messages: problems,
        });
    }
    Ok(m)
}

fn decode(m: &ModelInstance, f: &Feature, json: &Json) -> Result<Value, ModelError> {
    let scalar = |j: &Json| -> Result<Value, ModelError> {
        match f {
            Feature::Attr(a) => match (a.ty, j) {
                (PrimitiveType::Int, Json::Number(n)) => n
                    .as_i64()
                    .map(Value::Int)
                    .ok_or_else(|| conf(format!("{n} is not a 64-bit integer"))),
                (PrimitiveType::Bool, Json::Bool(b)) => Ok(Value::Bool(*b)),
                (PrimitiveType::String, Json::String(s)) => Ok(Value::Str(s.clone())),
                (ty, other) => Err(conf(format!("expected {}, found {other}", ty.name()))),
            },
            Feature::Ref(_) => match j {
                Json::String(s) if s.starts_with('@') => m
                    .by_label(&s[1..])
                    .map(Value::Obj)
                    .ok_or_else(|| resolution(format!("reference to undeclared object `{s}`"))),
                other => Err(conf(format!("expected an \"@id\" reference, found {other}"))),
            },
        }
    };
    if f.is_many() {
        let Json::Array(items) = json else {
            return Err(conf(format!("expected an array, found {json}")));
        };
        let vals = items.iter().map(scalar).collect::<Result<Vec<_>, _>>()?;
        Ok(Value::Coll(Collection::new(slot_kind(f), vals)))
    } else if json.is_null() {
        match f {
            Feature::Ref(_) => Ok(Value::Void),
            Feature::Attr(_) => Err(conf("attributes cannot be null")),
        }
    } else {
        scalar(json)
    }
}

fn conf(msg: impl Into<String>) -> ModelError {
    ModelError::one(ModelErrorKind::Conformance, msg)
}

/// Adds the back-links for every opposite slot the file left out.
fn derive_opposites(
    m: &mut ModelInstance,
    woven: &WovenModel,
    present: &HashSet<(ObjId, String)>,
) -> Result<(), ModelError> {
    let ids: Vec<ObjId> = m.ids().collect();
    for o in ids {
        let class = m.class_of(o).to_string();
        let refs: Vec<_> = woven
            .class(&class)
            .map(|c| {
                c.features
                    .values()
                    .filter_map(|f| f.feature.as_ref().cloned())
                    .collect()
            })
            .unwrap_or_default();
        for r in refs {
            let Some(opp) = &r.opposite else { continue };
            if !present.contains(&(o, r.name.clone())) {
                continue;
            }
            for t in m.targets(o, &r.name) {
                if present.contains(&(t, opp.clone())) {
                    continue;
                }
                let Some(Feature::Ref(back)) = woven.feature(m.class_of(t), opp).cloned() else {
                    continue;
                };
                let slot = m.obj_mut(t).slots.entry(opp.clone()).or_insert(Value::Void);
                if back.multiplicity.is_many() {
                    if let Value::Coll(c) = slot {
                        c.push(Value::Obj(o));
                    }
                } else {
                    match slot {
                        Value::Void => *slot = Value::Obj(o),
                        Value::Obj(x) if *x == o => {}
                        _ => {
                            return Err(conf(format!(
                                "{}.{opp} would need more than one value as the opposite of `{}`",
                                m.label(t),
                                r.name
                            )))
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn assign_containers(m: &mut ModelInstance, woven: &WovenModel) -> Result<(), ModelError> {
    let ids: Vec<ObjId> = m.ids().collect();
    for o in ids {
        let class = m.class_of(o).to_string();
        let Some(wc) = woven.class(&class) else { continue };
        let containments: Vec<String> = wc
            .features
            .values()
            .filter_map(|f| f.feature.as_ref())
            .filter(|r| r.is_containment)
            .map(|r| r.name.clone())
            .collect();
        for fname in containments {
            for child in m.targets(o, &fname) {
                if let Some((prev, pf)) = &m.obj(child).container {
                    return Err(conf(format!(
                        "{} is contained by both {}.{pf} and {}.{fname}",
                        m.label(child),
                        m.label(*prev),
                        m.label(o)
                    )));
                }
                m.set_container(child, Some((o, fname.clone())));
            }
        }
    }
    Ok(())
}

/// Every way `m` fails to conform to `woven`; empty when it conforms.
pub fn conformance(woven: &WovenModel, m: &ModelInstance) -> Vec<String> {
    let mut out = Vec::new();
    let mut contained_by: BTreeMap<ObjId, Vec<(ObjId, String)>> = BTreeMap::new();
    for o in m.objects() {
        let Some(wc) = woven.class(&o.class_name) else {
            out.push(format!("{}: unknown class `{}`", o.label, o.class_name));
            continue;
        };
        for name in o.slots.keys() {
            if !wc.features.contains_key(name) {
                out.push(format!("{}: class `{}` has no feature `{name}`", o.label, o.class_name));
            }
        }
        for (name, wf) in &wc.features {
            let f = &wf.feature;
            let Some(v) = o.slots.get(name) else {
                out.push(format!("{}.{name}: missing slot", o.label));
                continue;
            };
            let items: Vec<&Value> = match (f.is_many(), v) {
                (true, Value::Coll(c)) => c.items().iter().collect(),
                (true, other) => {
                    out.push(format!(
                        "{}.{name}: expected a collection, found {}",
                        o.label,
                        other.type_name()
                    ));
                    continue;
                }
                (false, Value::Void) => Vec::new(),
                (false, v) => vec![v],
            };
            let b = f.multiplicity();
            let n = items.len() as u32;
            let too_many = matches!(b.upper, Upper::Bounded(u) if n > u);
            if n < b.lower || too_many {
                out.push(format!("{}.{name}: {n} value(s) outside bounds {b}", o.label));
            }
            for item in items {
                match (f, item) {
                    (Feature::Attr(a), v) => {
                        let ok = matches!(
                            (a.ty, v),
                            (PrimitiveType::Int, Value::Int(_))
                                | (PrimitiveType::Bool, Value::Bool(_))
                                | (PrimitiveType::String, Value::Str(_))
                        );
                        if !ok {
                            out.push(format!(
                                "{}.{name}: {} is not a {}",
                                o.label,
                                v.type_name(),
                                a.ty.name()
                            ));
                        }
                    }
                    (Feature::Ref(r), Value::Obj(t)) => {
                        if t.0 as usize >= m.len() {
                            out.push(format!("{}.{name}: dangling reference", o.label));
                            continue;
                        }
                        let tc = m.class_of(*t);
                        if !woven.conforms(tc, &r.target) {
                            out.push(format!(
                                "{}.{name}: {} is a {tc}, not a {}",
                                o.label,
                                m.label(*t),
                                r.target
                            ));
                        }
                        if let Some(opp) = &r.opposite {
                            if !m.targets(*t, opp).contains(&o.id) {
                                out.push(format!(
                                    "{}.{name} holds {} but {}.{opp} does not hold {}",
                                    o.label,
                                    m.label(*t),
                                    m.label(*t),
                                    o.label
                                ));
                            }
                        }
                        if r.is_containment {
                            contained_by.entry(*t).or_default().push((o.id, name.clone()));
                        }
                    }
                    (Feature::Ref(_), v) => out.push(format!("{}.{name}: {} is not an object", o.label, v.type_name())),
                }
            }
        }
    }
    for o in m.objects() {
        let holders = contained_by.get(&o.id).map(Vec::as_slice).unwrap_or_default();
        if holders.len() > 1 {
            out.push(format!("{}: contained by {} objects", o.label, holders.len()));
        }
        let expected = holders.first().cloned();
        if o.container != expected {
            out.push(format!(
                "{}: recorded container disagrees with containment slots",
                o.label
            ));
        }
        // Walk up; a chain longer than the model revisits an object.
        let mut cur = o.container.as_ref().map(|(c, _)| *c);
        let mut steps = 0;
        while let Some(c) = cur {
            steps += 1;
            if c == o.id || steps > m.len() {
                out.push(format!("{}: containment cycle", o.label));
                break;
            }
            cur = m.obj(c).container.as_ref().map(|(p, _)| *p);
        }
    }
    let rootset: HashSet<ObjId> = m.roots().iter().copied().collect();
    for o in m.objects() {
        if o.container.is_none() != rootset.contains(&o.id) {
            out.push(format!("{}: root list disagrees with containment", o.label));
        }
    }
    out
}

/// Serializes a conforming model: objects ordered by id, slot keys sorted.
pub fn save_model(woven: &WovenModel, m: &ModelInstance) -> Result<String, ModelError> {
    let problems = conformance(woven, m);
    if !problems.is_empty() {
        return Err(ModelError {
            kind: ModelErrorKind::Conformance,
            messages: problems,
        });
    }
    let mut objs: Vec<_> = m.objects().iter().collect();
    objs.sort_by(|a, b| a.label.cmp(&b.label));
    let objects: Vec<Json> = objs
        .iter()
        .map(|o| {
            let slots: Map<String, Json> = o.slots.iter().map(|(k, v)| (k.clone(), encode(m, v))).collect();
            json!({"id": o.label, "class": o.class_name, "slots": slots})
        })
        .collect();
    let roots: Vec<Json> = m
        .roots()
        .iter()
        .map(|r| Json::String(format!("@{}", m.label(*r))))
        .collect();
    let doc = json!({"conformsTo": m.conforms_to, "objects": objects, "roots": roots});
    let mut s = serde_json::to_string_pretty(&doc).expect("model JSON is serializable");
    s.push('\n');
    Ok(s)
}

fn encode(m: &ModelInstance, v: &Value) -> Json {
    match v {
        Value::Int(i) => json!(i),
        Value::Bool(b) => json!(b),
        Value::Str(s) => json!(s),
        Value::Void => Json::Null,
        Value::Obj(o) => Json::String(format!("@{}", m.label(*o))),
        Value::Coll(c) => Json::Array(c.items().iter().map(|x| encode(m, x)).collect()),
    }
}

/// Evaluates every flat invariant on every object, ordered by object and
/// then by invariant order along the linearization.
pub fn check_model(woven: &WovenModel, m: &ModelInstance) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for id in m.ids() {
        if let Some(wc) = woven.class(m.class_of(id)) {
            for inv in &wc.flat_invariants {
                out.push(check_invariant(woven, m, &inv.clause, id));
            }
        }
    }
    out
}
