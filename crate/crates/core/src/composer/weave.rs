use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use crate::behavior::{MethodDef, Renaming};
use crate::contracts::{NamedClause, OpClause};
use crate::diag::{Code, Diagnostic, Pos};
use crate::meta::{Attribute, Feature, OperationSig, Reference, ROOT_CLASS};

use super::linearize::linearize_all;
use super::validate::validate_woven;
use super::woven::{
    AspectSummary, ContractGroup, FlatInvariant, MethodEntry, SigEntry, UnitInfo, WovenClass, WovenFeature, WovenModel,
    WovenOrigin,
};
use super::{LoadedUnit, Unit};

/// Where a class definition comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefinitionSite {
    BaseMetamodel,
    Aspect,
}

/// The three ways two same-named class definitions can meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompositionCase {
    /// Two aspects: their contributions merge.
    KmtKmt,
    /// Two metamodel classes: forbidden.
    EcoreEcore,
    /// A metamodel class reopened by an aspect.
    EcoreKmt,
}

pub fn classify_pair(a: DefinitionSite, b: DefinitionSite) -> CompositionCase {
    match (a, b) {
        (DefinitionSite::Aspect, DefinitionSite::Aspect) => CompositionCase::KmtKmt,
        (DefinitionSite::BaseMetamodel, DefinitionSite::BaseMetamodel) => CompositionCase::EcoreEcore,
        _ => CompositionCase::EcoreKmt,
    }
}

/// Everything the aspects of one or more units add to one class. Each
/// member carries the unit it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AspectContribution {
    pub class_name: String,
    pub units: Vec<String>,
    pub supertypes: Vec<(String, String)>,
    pub attributes: Vec<(Attribute, String)>,
    pub references: Vec<(Reference, String)>,
    pub methods: Vec<(Arc<MethodDef>, String)>,
    pub renamings: Vec<(Renaming, String)>,
    pub invariants: Vec<NamedClause>,
    pub pre: Vec<OpClause>,
    pub post: Vec<OpClause>,
    pub pos: Pos,
}

impl AspectContribution {
    pub fn empty(class_name: &str, unit: &str, pos: Pos) -> Self {
        AspectContribution {
            class_name: class_name.to_string(),
            units: vec![unit.to_string()],
            supertypes: Vec::new(),
            attributes: Vec::new(),
            references: Vec::new(),
            methods: Vec::new(),
            renamings: Vec::new(),
            invariants: Vec::new(),
            pre: Vec::new(),
            post: Vec::new(),
            pos,
        }
    }

    /// (kind, name, unit) of every named member, for clash detection.
    fn member_keys(&self) -> Vec<(&'static str, String, &str, Pos)> {
        let mut out = Vec::new();
        for (a, u) in &self.attributes {
            out.push(("feature", a.name.clone(), u.as_str(), a.pos));
        }
        for (r, u) in &self.references {
            out.push(("feature", r.name.clone(), u.as_str(), r.pos));
        }
        for (m, u) in &self.methods {
            out.push(("method", m.sig.name.clone(), u.as_str(), m.sig.pos));
        }
        for (r, u) in &self.renamings {
            out.push(("renaming", r.new_name.clone(), u.as_str(), r.pos));
        }
        for c in &self.invariants {
            out.push(("invariant", c.name.clone(), c.unit.as_str(), c.pos));
        }
        for c in &self.pre {
            out.push((
                "precondition",
                format!("{}.{}", c.op, c.clause.name),
                c.clause.unit.as_str(),
                c.clause.pos,
            ));
        }
        for c in &self.post {
            out.push((
                "postcondition",
                format!("{}.{}", c.op, c.clause.name),
                c.clause.unit.as_str(),
                c.clause.pos,
            ));
        }
        out
    }
}

/// Case-1 merge of two contributions to the same class. Members keep their
/// order (`a` first); any member name defined by both is a clash.
pub fn merge_contributions(
    a: &AspectContribution,
    b: &AspectContribution,
) -> Result<AspectContribution, Vec<Diagnostic>> {
    let left = a.member_keys();
    let mut diags = Vec::new();
    for (kind, name, unit, pos) in b.member_keys() {
        if let Some((_, _, other, _)) = left.iter().find(|(k, n, _, _)| *k == kind && *n == name) {
            diags.push(Diagnostic::new(
                unit,
                pos,
                Code::FeatureClash,
                format!(
                    "{kind} `{name}` of class `{}` is contributed by both `{other}` and `{unit}`",
                    a.class_name
                ),
            ));
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let mut m = a.clone();
    for u in &b.units {
        if !m.units.contains(u) {
            m.units.push(u.clone());
        }
    }
    for s in &b.supertypes {
        if !m.supertypes.iter().any(|(x, _)| *x == s.0) {
            m.supertypes.push(s.clone());
        }
    }
    m.attributes.extend(b.attributes.iter().cloned());
    m.references.extend(b.references.iter().cloned());
    m.methods.extend(b.methods.iter().cloned());
    m.renamings.extend(b.renamings.iter().cloned());
    m.invariants.extend(b.invariants.iter().cloned());
    m.pre.extend(b.pre.iter().cloned());
    m.post.extend(b.post.iter().cloned());
    Ok(m)
}

struct BaseDef {
    unit: String,
    metamodel: String,
    class: crate::meta::MetaClass,
}

/// Weaves the units into one class table. Units must be in require order.
pub fn compose(package: &str, units: &[LoadedUnit]) -> Result<WovenModel, Vec<Diagnostic>> {
    let mut diags = Vec::new();

    // Base classes; two metamodel definitions of one name are never merged.
    let mut bases: BTreeMap<String, BaseDef> = BTreeMap::new();
    let mut class_order = Vec::new();
    for u in units {
        let Unit::Metamodel(mm) = &u.unit else { continue };
        for c in &mm.classes {
            if let Some(prev) = bases.get(&c.name) {
                debug_assert_eq!(
                    classify_pair(DefinitionSite::BaseMetamodel, DefinitionSite::BaseMetamodel),
                    CompositionCase::EcoreEcore
                );
                diags.push(Diagnostic::new(
                    &u.name,
                    c.pos,
                    Code::ForbiddenComposition,
                    format!(
                        "class `{}` is defined by metamodel units `{}` and `{}`; two metamodel classes with the same name cannot be composed",
                        c.name, prev.unit, u.name
                    ),
                ));
                continue;
            }
            class_order.push(c.name.clone());
            bases.insert(
                c.name.clone(),
                BaseDef {
                    unit: u.name.clone(),
                    metamodel: mm.name.clone(),
                    class: c.clone(),
                },
            );
        }
    }
    if bases.is_empty() && diags.is_empty() {
        let unit = units.first().map(|u| u.name.as_str()).unwrap_or(package);
        diags.push(Diagnostic::new(
            unit,
            Pos::new(1, 1),
            Code::ResolutionError,
            "a language needs at least one metamodel unit",
        ));
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    class_order.push(ROOT_CLASS.to_string());

    // Aspect contributions, merged per class in require order.
    let mut merged: BTreeMap<String, AspectContribution> = BTreeMap::new();
    for c in contributions(units) {
        if !bases.contains_key(&c.class_name) && c.class_name != ROOT_CLASS {
            diags.push(Diagnostic::new(
                &c.units[0],
                c.pos,
                Code::ResolutionError,
                format!("aspect targets unknown class `{}`", c.class_name),
            ));
            continue;
        }
        match merged.remove(&c.class_name) {
            None => {
                merged.insert(c.class_name.clone(), c);
            }
            Some(prev) => match merge_contributions(&prev, &c) {
                Ok(m) => {
                    merged.insert(c.class_name.clone(), m);
                }
                Err(ds) => {
                    diags.extend(ds);
                    merged.insert(c.class_name.clone(), prev);
                }
            },
        }
    }

    // Case 3: aspect members must not collide with the base definition.
    for (name, c) in &merged {
        let Some(base) = bases.get(name) else { continue };
        let base_features: HashSet<&str> = base.class.feature_names().map(|(n, _)| n).collect();
        for (n, unit, pos) in c
            .attributes
            .iter()
            .map(|(a, u)| (&a.name, u, a.pos))
            .chain(c.references.iter().map(|(r, u)| (&r.name, u, r.pos)))
        {
            if base_features.contains(n.as_str()) {
                diags.push(Diagnostic::new(
                    unit,
                    pos,
                    Code::FeatureClash,
                    format!("feature `{n}` of class `{name}` is already declared by `{}`", base.unit),
                ));
            }
        }
    }

    // Supertype graph with aspect-added supertypes appended.
    let mut supers: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (name, b) in &bases {
        let mut s = b.class.supertypes.clone();
        if let Some(c) = merged.get(name) {
            for (added, unit) in &c.supertypes {
                if !bases.contains_key(added) && added != ROOT_CLASS {
                    diags.push(Diagnostic::new(
                        unit,
                        c.pos,
                        Code::ResolutionError,
                        format!("added supertype `{added}` of `{name}` is not a known class"),
                    ));
                } else if added == name {
                    diags.push(Diagnostic::new(
                        unit,
                        c.pos,
                        Code::CycleError,
                        format!("class `{name}` cannot inherit from itself"),
                    ));
                } else if !s.contains(added) {
                    s.push(added.clone());
                }
            }
        }
        s.retain(|x| x != ROOT_CLASS);
        supers.insert(name.clone(), s);
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let lins = match linearize_all(&supers) {
        Ok(l) => l,
        Err(cycle) => {
            let first = &cycle[0];
            let unit = merged
                .get(first)
                .map(|c| c.units[0].clone())
                .unwrap_or_else(|| bases[first].unit.clone());
            let pos = merged.get(first).map(|c| c.pos).unwrap_or(bases[first].class.pos);
            return Err(vec![Diagnostic::new(
                unit,
                pos,
                Code::CycleError,
                format!("supertype cycle {}", cycle.join(" -> ")),
            )]);
        }
    };

    // Per-class own members.
    let mut classes: BTreeMap<String, WovenClass> = BTreeMap::new();
    let mut provenance = BTreeMap::new();
    let empty = AspectContribution::empty(ROOT_CLASS, "", Pos::default());
    for name in &class_order {
        let (mut wc, base) = match bases.get(name) {
            Some(b) => {
                let mut wc = WovenClass::new(name, WovenOrigin::BaseMetamodel);
                wc.is_abstract = b.class.is_abstract;
                wc.metamodel = Some(b.metamodel.clone());
                wc.base_unit = Some(b.unit.clone());
                wc.supertypes = supers[name].clone();
                wc.linearization = lins[name].clone();
                (wc, Some(b))
            }
            None => {
                let mut wc = WovenClass::new(name, WovenOrigin::AspectOnly);
                wc.is_abstract = true;
                wc.linearization = vec![ROOT_CLASS.to_string()];
                (wc, None)
            }
        };
        let c = merged.get(name).unwrap_or(&empty);
        let mut own: Vec<(Feature, String)> = Vec::new();
        if let Some(b) = base {
            own.extend(
                b.class
                    .attributes
                    .iter()
                    .map(|a| (Feature::Attr(a.clone()), b.unit.clone())),
            );
            own.extend(
                b.class
                    .references
                    .iter()
                    .map(|r| (Feature::Ref(r.clone()), b.unit.clone())),
            );
            for op in &b.class.operations {
                wc.own_signatures.insert(op.name.clone(), op.clone());
                provenance.insert(format!("{name}.{}()", op.name), b.unit.clone());
            }
        }
        own.extend(c.attributes.iter().map(|(a, u)| (Feature::Attr(a.clone()), u.clone())));
        own.extend(c.references.iter().map(|(r, u)| (Feature::Ref(r.clone()), u.clone())));
        for (f, unit) in own {
            provenance.insert(format!("{name}.{}", f.name()), unit.clone());
            wc.own_features.push(f.name().to_string());
            wc.features.entry(f.name().to_string()).or_insert(WovenFeature {
                feature: f,
                defining_class: name.clone(),
                unit,
            });
        }
        for (m, unit) in &c.methods {
            provenance.insert(format!("{name}.{}()", m.sig.name), unit.clone());
            wc.own_methods.insert(
                m.sig.name.clone(),
                MethodEntry {
                    defining_class: name.clone(),
                    method: m.clone(),
                    unit: unit.clone(),
                },
            );
        }
        wc.renamings = c.renamings.iter().map(|(r, _)| r.clone()).collect();
        wc.own_invariants = c.invariants.clone();
        for inv in &c.invariants {
            provenance.insert(format!("{name}.inv.{}", inv.name), inv.unit.clone());
        }
        for p in &c.pre {
            provenance.insert(format!("{name}.{}.pre.{}", p.op, p.clause.name), p.clause.unit.clone());
            wc.own_pre.entry(p.op.clone()).or_default().push(p.clause.clone());
        }
        for p in &c.post {
            provenance.insert(format!("{name}.{}.post.{}", p.op, p.clause.name), p.clause.unit.clone());
            wc.own_post.entry(p.op.clone()).or_default().push(p.clause.clone());
        }
        wc.aspects = summarize(c, merged.contains_key(name));
        classes.insert(name.clone(), wc);
    }

    // Inherited tables over each linearization.
    let mut clash_seen = BTreeSet::new();
    let mut inherited: Vec<(String, WovenClass)> = Vec::new();
    for name in &class_order {
        let wc = &classes[name];
        let mut next = wc.clone();
        for anc in wc.linearization.iter().skip(1) {
            let ac = &classes[anc];
            for fname in &ac.own_features {
                let wf = &ac.features[fname];
                match next.features.get(fname) {
                    None => {
                        next.features.insert(fname.clone(), wf.clone());
                    }
                    Some(existing) if existing.defining_class != wf.defining_class => {
                        let mut pair = [existing.defining_class.clone(), wf.defining_class.clone()];
                        pair.sort();
                        if clash_seen.insert((fname.clone(), pair.clone())) {
                            diags.push(Diagnostic::new(
                                &wf.unit,
                                wf.feature.pos(),
                                Code::FeatureClash,
                                format!(
                                    "feature `{fname}` is declared by both `{}` and `{}`, which `{name}` inherits together",
                                    pair[0], pair[1]
                                ),
                            ));
                        }
                    }
                    Some(_) => {}
                }
            }
        }
        build_method_table(&mut next, &classes, &mut diags);
        flatten_contracts(&mut next, &classes);
        inherited.push((name.clone(), next));
    }
    for (n, c) in inherited {
        classes.insert(n, c);
    }
    check_ambiguity(&classes, &bases, &mut diags);
    if !diags.is_empty() {
        return Err(diags);
    }

    let woven = WovenModel {
        package: package.to_string(),
        units: units
            .iter()
            .map(|u| UnitInfo {
                name: u.name.clone(),
                kind: u.unit.kind(),
            })
            .collect(),
        classes,
        class_order,
        root_class: ROOT_CLASS.to_string(),
        provenance,
    };
    let v = validate_woven(&woven);
    if v.is_empty() {
        Ok(woven)
    } else {
        Err(v)
    }
}

fn contributions(units: &[LoadedUnit]) -> Vec<AspectContribution> {
    let mut out = Vec::new();
    for u in units {
        match &u.unit {
            Unit::Metamodel(_) => {}
            Unit::Contracts(cm) => {
                for c in &cm.contributions {
                    let mut a = AspectContribution::empty(&c.class_name, &u.name, c.pos);
                    a.invariants = c.invariants.clone();
                    a.pre = c.pre.clone();
                    a.post = c.post.clone();
                    out.push(a);
                }
            }
            Unit::Behavior(bm) => {
                for asp in &bm.aspects {
                    let mut a = AspectContribution::empty(&asp.class_name, &u.name, asp.pos);
                    let tag = |x: String| (x, u.name.clone());
                    a.supertypes = asp.added_supertypes.iter().cloned().map(tag).collect();
                    a.attributes = asp
                        .added_attributes
                        .iter()
                        .map(|x| (x.clone(), u.name.clone()))
                        .collect();
                    a.references = asp
                        .added_references
                        .iter()
                        .map(|x| (x.clone(), u.name.clone()))
                        .collect();
                    a.methods = asp.methods.iter().map(|x| (x.clone(), u.name.clone())).collect();
                    a.renamings = asp.renamings.iter().map(|x| (x.clone(), u.name.clone())).collect();
                    out.push(a);
                }
            }
        }
    }
    out
}

fn render_sig(sig: &OperationSig) -> String {
    let params: Vec<String> = sig.params.iter().map(|p| format!("{}: {}", p.name, p.ty)).collect();
    let ret = match &sig.return_type {
        crate::types::TypeRef::Void => String::new(),
        t => format!(": {t}"),
    };
    format!("{}({}){}", sig.name, params.join(", "), ret)
}

/// Per-unit member listing of a merged contribution, for the report.
fn summarize(c: &AspectContribution, present: bool) -> Vec<AspectSummary> {
    if !present {
        return Vec::new();
    }
    c.units
        .iter()
        .map(|unit| {
            let mine = |u: &String| u == unit;
            let mut members = Vec::new();
            for (a, _) in c.attributes.iter().filter(|(_, u)| mine(u)) {
                members.push(format!(
                    "val {}: {}{}",
                    a.name,
                    a.ty.name(),
                    bounds_suffix(a.multiplicity)
                ));
            }
            for (r, _) in c.references.iter().filter(|(_, u)| mine(u)) {
                members.push(format!("val {}: {}{}", r.name, r.target, bounds_suffix(r.multiplicity)));
            }
            for (m, _) in c.methods.iter().filter(|(_, u)| mine(u)) {
                let kw = if m.overrides { "override def" } else { "def" };
                members.push(format!("{kw} {}", render_sig(&m.sig)));
            }
            for (r, _) in c.renamings.iter().filter(|(_, u)| mine(u)) {
                members.push(format!("rename {} from {} as {}", r.op, r.from, r.new_name));
            }
            for i in c.invariants.iter().filter(|i| mine(&i.unit)) {
                members.push(format!("inv {}", i.name));
            }
            for p in c.pre.iter().filter(|p| mine(&p.clause.unit)) {
                members.push(format!("pre {} on {}", p.clause.name, p.op));
            }
            for p in c.post.iter().filter(|p| mine(&p.clause.unit)) {
                members.push(format!("post {} on {}", p.clause.name, p.op));
            }
            AspectSummary {
                unit: unit.clone(),
                added_supertypes: c
                    .supertypes
                    .iter()
                    .filter(|(_, u)| mine(u))
                    .map(|(s, _)| s.clone())
                    .collect(),
                members,
            }
        })
        .collect()
}

fn bounds_suffix(b: crate::types::Bounds) -> String {
    if b == crate::types::Bounds::ONE {
        String::new()
    } else {
        b.to_string()
    }
}

/// Builds `wc.method_table` and `wc.signatures` from the own members of every
/// class in its linearization, then applies the renamings in scope.
fn build_method_table(wc: &mut WovenClass, classes: &BTreeMap<String, WovenClass>, diags: &mut Vec<Diagnostic>) {
    let own = |n: &str| -> &WovenClass {
        if n == wc.name {
            wc
        } else {
            &classes[n]
        }
    };
    let mut table: BTreeMap<String, Vec<MethodEntry>> = BTreeMap::new();
    let mut sigs: BTreeMap<String, SigEntry> = BTreeMap::new();
    let mut renamings: Vec<(Renaming, String)> = Vec::new();
    for k in &wc.linearization {
        let kc = own(k);
        for (op, e) in &kc.own_methods {
            table.entry(op.clone()).or_default().push(e.clone());
        }
        for (op, s) in &kc.own_signatures {
            sigs.entry(op.clone()).or_insert_with(|| SigEntry {
                sig: s.clone(),
                defining_class: k.clone(),
            });
        }
        for (op, e) in &kc.own_methods {
            sigs.entry(op.clone()).or_insert_with(|| SigEntry {
                sig: e.method.sig.clone(),
                defining_class: k.clone(),
            });
        }
        renamings.extend(kc.renamings.iter().map(|r| (r.clone(), k.clone())));
    }

    for (r, declared_in) in renamings {
        let from_ok = wc.linearization.iter().skip(1).any(|c| *c == r.from)
            || (declared_in != wc.name && wc.linearization.contains(&r.from));
        let source: Vec<MethodEntry> = if from_ok {
            classes[&r.from]
                .linearization
                .iter()
                .filter_map(|k| own(k).own_methods.get(&r.op).cloned())
                .collect()
        } else {
            Vec::new()
        };
        if source.is_empty() {
            if declared_in == wc.name {
                let unit = wc
                    .aspects
                    .iter()
                    .find(|a| {
                        a.members
                            .iter()
                            .any(|m| m.starts_with(&format!("rename {} from {}", r.op, r.from)))
                    })
                    .map(|a| a.unit.clone())
                    .unwrap_or_default();
                diags.push(Diagnostic::new(
                    unit,
                    r.pos,
                    Code::RenameTargetMissing,
                    format!(
                        "`rename {} from {}` in `{}`: `{}` is not an ancestor that defines `{}`",
                        r.op, r.from, wc.name, r.from, r.op
                    ),
                ));
            }
            continue;
        }
        if table.contains_key(&r.new_name) || sigs.contains_key(&r.new_name) {
            if declared_in == wc.name {
                diags.push(Diagnostic::new(
                    wc.base_unit.clone().unwrap_or_default(),
                    r.pos,
                    Code::DuplicateName,
                    format!("`{}` already names an operation of `{}`", r.new_name, wc.name),
                ));
            }
            continue;
        }
        // Drop the renamed branch from `op`, keeping ancestors still shared
        // with the remaining definitions.
        let from_lin = &classes[&r.from].linearization;
        if let Some(entries) = table.get_mut(&r.op) {
            let kept_lins: Vec<&Vec<String>> = entries
                .iter()
                .filter(|e| !from_lin.contains(&e.defining_class))
                .map(|e| &classes[&e.defining_class].linearization)
                .collect();
            let shared: HashSet<&String> = kept_lins.iter().flat_map(|l| l.iter()).collect();
            entries.retain(|e| !from_lin.contains(&e.defining_class) || shared.contains(&e.defining_class));
        }
        let mut sig = source[0].method.sig.clone();
        sig.name = r.new_name.clone();
        sigs.insert(
            r.new_name.clone(),
            SigEntry {
                sig,
                defining_class: r.from.clone(),
            },
        );
        table.insert(r.new_name.clone(), source);
    }
    wc.method_table = table;
    wc.signatures = sigs;
}

/// An op is ambiguous on a class when its most specific definitions come
/// from two classes neither of which inherits from the other.
fn check_ambiguity(
    classes: &BTreeMap<String, WovenClass>,
    bases: &BTreeMap<String, BaseDef>,
    diags: &mut Vec<Diagnostic>,
) {
    for (name, wc) in classes {
        for (op, entries) in &wc.method_table {
            let definers: Vec<&str> = entries.iter().map(|e| e.defining_class.as_str()).collect();
            let most_specific: Vec<&str> = definers
                .iter()
                .copied()
                .filter(|d| {
                    !definers
                        .iter()
                        .any(|o| o != d && classes[*o].linearization.iter().any(|l| l == d))
                })
                .collect();
            if most_specific.len() >= 2 {
                let (unit, pos) = bases
                    .get(name)
                    .map(|b| (b.unit.clone(), b.class.pos))
                    .unwrap_or_default();
                diags.push(Diagnostic::new(
                    unit,
                    pos,
                    Code::AmbiguousMethod,
                    format!(
                        "`{name}` inherits `{op}` from both `{}` and `{}`; add `rename {op} from {} as <newName>;` to an aspect of `{name}` or override it",
                        most_specific[1], most_specific[0], most_specific[0]
                    ),
                ));
            }
        }
    }
}

/// Invariants of every class in the linearization; pre/postconditions
/// grouped per declaring class level.
fn flatten_contracts(wc: &mut WovenClass, classes: &BTreeMap<String, WovenClass>) {
    let mut invs = Vec::new();
    let mut pre: BTreeMap<String, Vec<ContractGroup>> = BTreeMap::new();
    let mut post: BTreeMap<String, Vec<ContractGroup>> = BTreeMap::new();
    for k in &wc.linearization {
        let kc = if *k == wc.name { &*wc } else { &classes[k] };
        invs.extend(kc.own_invariants.iter().map(|c| FlatInvariant {
            owner: k.clone(),
            clause: c.clone(),
        }));
        for (op, clauses) in &kc.own_pre {
            pre.entry(op.clone()).or_default().push(ContractGroup {
                owner: k.clone(),
                clauses: clauses.clone(),
            });
        }
        for (op, clauses) in &kc.own_post {
            post.entry(op.clone()).or_default().push(ContractGroup {
                owner: k.clone(),
                clauses: clauses.clone(),
            });
        }
    }
    wc.flat_invariants = invs;
    wc.flat_pre = pre;
    wc.flat_post = post;
}
