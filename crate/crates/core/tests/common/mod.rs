//! Test-side oracles, written independently of the library's algorithms.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;

use mashup_core::composer::{compose_sources, WovenModel};
use mashup_core::expr::Value;
use mashup_core::meta::Feature;
use mashup_core::runtime::{ModelInstance, ObjId};

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture(rel: &str) -> PathBuf {
    crate_dir().join(rel)
}

/// Runs the `mashup` binary from the crate directory with color off.
pub fn mashup(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_mashup"))
        .args(args)
        .current_dir(crate_dir())
        .env("MASHUP_COLOR", "0")
        .output()
        .expect("run mashup");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

pub fn woven(sources: &[(&str, &str)]) -> WovenModel {
    compose_sources(sources).unwrap_or_else(|d| {
        panic!(
            "composition failed:\n{}",
            d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("\n")
        )
    })
}

pub fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

// ---------------------------------------------------------------------------
// Linearization oracle: the right-biased concatenation operator, applied as
// a right fold, with no memoization.

/// `a ⊕ b`: elements of `b` replace equal elements of `a`.
fn replace_concat(a: &[usize], b: &[usize]) -> Vec<usize> {
    match a.split_first() {
        None => b.to_vec(),
        Some((x, rest)) if b.contains(x) => replace_concat(rest, b),
        Some((x, rest)) => {
            let mut v = vec![*x];
            v.extend(replace_concat(rest, b));
            v
        }
    }
}

/// Linearization of class `c` where `supers[c]` lists direct supertypes in
/// declaration order. The root is implicit and excluded.
pub fn oracle_lin(c: usize, supers: &[Vec<usize>]) -> Vec<usize> {
    // lin(C) = C, lin(Sn) ⊕ ... ⊕ lin(S1)
    let mut tail: Vec<usize> = Vec::new();
    for s in &supers[c] {
        tail = replace_concat(&oracle_lin(*s, supers), &tail);
    }
    let mut out = vec![c];
    out.extend(tail);
    out
}

/// Every ordered selection (without repetition) from `0..n`.
pub fn ordered_subsets(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        for i in 0..n {
            if !cur.contains(&i) {
                cur.push(i);
                go(n, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(n, &mut Vec::new(), &mut out);
    out
}

/// All class DAGs on `n` classes where class `i` may extend any ordered
/// selection of the classes before it.
pub fn all_dags(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut graphs: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for i in 0..n {
        let choices = ordered_subsets(i);
        graphs = graphs
            .into_iter()
            .flat_map(|g| {
                choices.iter().map(move |c| {
                    let mut g2 = g.clone();
                    g2.push(c.clone());
                    g2
                })
            })
            .collect();
    }
    graphs
}

// ---------------------------------------------------------------------------
// Model structure oracles.

/// Problems with opposite coherence or the containment forest; empty when
/// both hold. Reads only public slot data.
pub fn structural_violations(w: &WovenModel, m: &ModelInstance) -> Vec<String> {
    let mut out = Vec::new();
    let mut holders: BTreeMap<ObjId, Vec<ObjId>> = BTreeMap::new();
    for o in m.objects() {
        let wc = w.class(&o.class_name).unwrap();
        for (name, wf) in &wc.features {
            let Feature::Ref(r) = &wf.feature else { continue };
            for t in m.targets(o.id, name) {
                if let Some(opp) = &r.opposite {
                    if !m.targets(t, opp).contains(&o.id) {
                        out.push(format!("{}.{name} -> {} but not back via {opp}", o.label, m.label(t)));
                    }
                }
                if r.is_containment {
                    holders.entry(t).or_default().push(o.id);
                }
            }
        }
    }
    let roots: BTreeSet<ObjId> = m.roots().iter().copied().collect();
    for o in m.objects() {
        let h = holders.get(&o.id).cloned().unwrap_or_default();
        if h.len() > 1 {
            out.push(format!("{} has {} containers", o.label, h.len()));
        }
        if m.container(o.id) != h.first().copied() {
            out.push(format!("{} container field disagrees", o.label));
        }
        if roots.contains(&o.id) == m.container(o.id).is_some() {
            out.push(format!("{} root status disagrees", o.label));
        }
        let mut seen = BTreeSet::from([o.id]);
        let mut cur = m.container(o.id);
        while let Some(c) = cur {
            if !seen.insert(c) {
                out.push(format!("{} sits on a containment cycle", o.label));
                break;
            }
            cur = m.container(c);
        }
    }
    out
}

/// Checks that `b` is `a` up to object-id renaming, using external labels
/// as the candidate bijection. Returns the first difference.
pub fn isomorphic(a: &ModelInstance, b: &ModelInstance) -> Result<(), String> {
    if a.len() != b.len() {
        return Err(format!("{} vs {} objects", a.len(), b.len()));
    }
    let map: BTreeMap<ObjId, ObjId> = a
        .objects()
        .iter()
        .map(|o| {
            b.by_label(&o.label)
                .map(|id| (o.id, id))
                .ok_or_else(|| format!("{} missing", o.label))
        })
        .collect::<Result<_, _>>()?;
    let tr = |v: &Value| -> Value { translate(v, &map) };
    for o in a.objects() {
        let p = b.obj(map[&o.id]);
        if o.class_name != p.class_name {
            return Err(format!("{}: class {} vs {}", o.label, o.class_name, p.class_name));
        }
        if o.slots.keys().collect::<Vec<_>>() != p.slots.keys().collect::<Vec<_>>() {
            return Err(format!("{}: slot names differ", o.label));
        }
        for (k, v) in &o.slots {
            if tr(v) != p.slots[k] {
                return Err(format!("{}.{k}: {:?} vs {:?}", o.label, v, p.slots[k]));
            }
        }
        let c1 = o.container.as_ref().map(|(c, f)| (map[c], f.clone()));
        if c1 != p.container {
            return Err(format!("{}: container differs", o.label));
        }
    }
    let r1: Vec<ObjId> = a.roots().iter().map(|r| map[r]).collect();
    if r1 != b.roots() {
        return Err("root order differs".into());
    }
    Ok(())
}

fn translate(v: &Value, map: &BTreeMap<ObjId, ObjId>) -> Value {
    match v {
        Value::Obj(o) => Value::Obj(map[o]),
        Value::Coll(c) => Value::coll(c.kind, c.items().iter().map(|x| translate(x, map))),
        other => other.clone(),
    }
}

// ---------------------------------------------------------------------------
// A three-class metamodel with every reference flavour: bidirectional
// one-to-many, many-to-many, optional-to-optional, and containment with and
// without an opposite.

pub const EMOF_MM: &str = "metamodel emof {
  class Group {
    attr title: String;
    ref members: Item[*] opposite group;
    ref leader: Item[0..1] opposite leads;
    ref items: Item[*] containment;
    ref tagged: Part[*] opposite tags;
  }
  class Item {
    attr weight: Int;
    ref group: Group[0..1] opposite members;
    ref leads: Group[0..1] opposite leader;
    ref parts: Part[*] containment opposite whole;
    ref sub: Item[*] containment;
  }
  class Part {
    attr flags: Bool[*];
    ref whole: Item[0..1] opposite parts;
    ref tags: Group[*] opposite tagged;
    ref spare: Group[0..1] containment;
  }
}";

pub fn emof_woven() -> WovenModel {
    woven(&[("emof.mm", EMOF_MM)])
}

// ---------------------------------------------------------------------------
// Random EMOF operation sequences.

use mashup_core::types::CollKind;
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Debug, Clone)]
pub enum Op {
    Create(&'static str),
    Set(ObjId, String, Value),
    Add(ObjId, String, Value),
    Remove(ObjId, String, Value),
}

const CLASSES: [&str; 3] = ["Group", "Item", "Part"];

fn random_string<R: Rng>(rng: &mut R) -> String {
    const PIECES: [&str; 8] = ["a", "Z", " ", "\"", "\\", "é", "@x", "\n"];
    (0..rng.gen_range(0..5)).map(|_| *PIECES.choose(rng).unwrap()).collect()
}

fn random_scalar<R: Rng>(rng: &mut R, m: &ModelInstance, f: &Feature) -> Value {
    match f {
        Feature::Attr(a) => match a.ty {
            mashup_core::types::PrimitiveType::Int => Value::Int(rng.gen_range(-1000..1000)),
            mashup_core::types::PrimitiveType::Bool => Value::Bool(rng.gen()),
            mashup_core::types::PrimitiveType::String => Value::Str(random_string(rng)),
        },
        Feature::Ref(_) => {
            if m.is_empty() || rng.gen_ratio(1, 10) {
                Value::Void
            } else {
                Value::Obj(ObjId(rng.gen_range(0..m.len() as u32)))
            }
        }
    }
}

pub fn random_op<R: Rng>(rng: &mut R, w: &WovenModel, m: &ModelInstance) -> Op {
    if m.is_empty() || rng.gen_ratio(1, 15) {
        return Op::Create(CLASSES.choose(rng).unwrap());
    }
    let obj = ObjId(rng.gen_range(0..m.len() as u32));
    let wc = w.class(m.class_of(obj)).unwrap();
    let names: Vec<&String> = wc.features.keys().collect();
    let name = (*names.choose(rng).unwrap()).clone();
    let f = &wc.features[&name].feature;
    match rng.gen_range(0..3) {
        0 => {
            let v = if f.is_many() {
                let n = rng.gen_range(0..4);
                let kind = if f.as_ref().is_some() {
                    CollKind::OrderedSet
                } else {
                    CollKind::Sequence
                };
                Value::coll(
                    kind,
                    (0..n).map(|_| random_scalar(rng, m, f)).filter(|v| *v != Value::Void),
                )
            } else {
                random_scalar(rng, m, f)
            };
            Op::Set(obj, name, v)
        }
        1 => {
            let v = random_scalar(rng, m, f);
            Op::Add(obj, name, v)
        }
        _ => {
            let current = m.targets(obj, &name);
            let v = match current.choose(rng) {
                Some(t) if rng.gen_bool(0.7) => Value::Obj(*t),
                _ => random_scalar(rng, m, f),
            };
            Op::Remove(obj, name, v)
        }
    }
}

/// Applies an operation; returns whether it faulted.
pub fn apply_op(w: &WovenModel, m: &mut ModelInstance, op: &Op) -> bool {
    let r = match op {
        Op::Create(c) => m.create(w, c).map(|_| ()),
        Op::Set(o, f, v) => m.set_feature(w, *o, f, v.clone()),
        Op::Add(o, f, v) => m.add_to_feature(w, *o, f, v.clone()),
        Op::Remove(o, f, v) => m.remove_from_feature(w, *o, f, v),
    };
    r.is_err()
}

/// A random model reached by `steps` operations from a few seed objects.
pub fn random_model<R: Rng>(rng: &mut R, w: &WovenModel, steps: usize) -> ModelInstance {
    let mut m = ModelInstance::new(w.package.clone());
    for c in CLASSES.iter().cycle().take(rng.gen_range(0..7)) {
        m.create(w, c).unwrap();
    }
    for _ in 0..steps {
        let op = random_op(rng, w, &m);
        apply_op(w, &mut m, &op);
    }
    m
}
