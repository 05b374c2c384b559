use std::collections::{BTreeSet, HashMap, HashSet};

use crate::diag::{Code, Diagnostic, Pos};
use crate::types::{Bounds, Upper};

use super::{MetaClass, Metamodel, Reference, ROOT_CLASS};

/// Checks every metamodel, class and reference invariant. Returns an empty
/// list iff the metamodel is well formed.
pub fn validate_metamodel(mm: &Metamodel) -> Vec<Diagnostic> {
    let unit = mm.source_unit.as_str();
    let mut out = Vec::new();
    let mut by_name: HashMap<&str, &MetaClass> = HashMap::new();

    for c in &mm.classes {
        if c.name == ROOT_CLASS {
            out.push(Diagnostic::new(
                unit,
                c.pos,
                Code::ReservedName,
                format!("`{ROOT_CLASS}` is the implicit root class and cannot be declared"),
            ));
        }
        if by_name.insert(&c.name, c).is_some() {
            out.push(Diagnostic::new(
                unit,
                c.pos,
                Code::DuplicateName,
                format!("class `{}` is declared more than once", mm.qualified_name(&c.name)),
            ));
        }
    }

    for c in &mm.classes {
        let mut seen = HashSet::new();
        for s in &c.supertypes {
            if !seen.insert(s) {
                out.push(Diagnostic::new(
                    unit,
                    c.pos,
                    Code::DuplicateName,
                    format!("class `{}` lists supertype `{s}` twice", c.name),
                ));
            }
            if !by_name.contains_key(s.as_str()) && s != ROOT_CLASS {
                out.push(Diagnostic::new(
                    unit,
                    c.pos,
                    Code::ResolutionError,
                    format!("supertype `{s}` of class `{}` is not declared", c.name),
                ));
            }
        }
    }

    out.extend(cycle_diagnostics(mm, &by_name));

    for c in &mm.classes {
        let mut names = HashSet::new();
        for (name, pos) in c.feature_names() {
            if !names.insert(name) {
                out.push(Diagnostic::new(
                    unit,
                    pos,
                    Code::DuplicateName,
                    format!("feature `{name}` is declared twice in class `{}`", c.name),
                ));
            }
        }
        for a in &c.attributes {
            check_bounds(unit, &c.name, &a.name, a.multiplicity, a.pos, &mut out);
        }
        for r in &c.references {
            check_bounds(unit, &c.name, &r.name, r.multiplicity, r.pos, &mut out);
            if !by_name.contains_key(r.target.as_str()) && r.target != ROOT_CLASS {
                out.push(Diagnostic::new(
                    unit,
                    r.pos,
                    Code::ResolutionError,
                    format!(
                        "target `{}` of reference `{}.{}` is not declared",
                        r.target, c.name, r.name
                    ),
                ));
                continue;
            }
            if let Some(opp) = &r.opposite {
                check_opposite(mm, &by_name, c, r, opp, &mut out);
            }
        }
        let mut ops = HashSet::new();
        for op in &c.operations {
            if !ops.insert(&op.name) {
                out.push(Diagnostic::new(
                    unit,
                    op.pos,
                    Code::DuplicateName,
                    format!("operation `{}` is declared twice in class `{}`", op.name, c.name),
                ));
            }
            let mut params = HashSet::new();
            for p in &op.params {
                if !params.insert(&p.name) {
                    out.push(Diagnostic::new(
                        unit,
                        op.pos,
                        Code::DuplicateName,
                        format!("parameter `{}` repeated in `{}.{}`", p.name, c.name, op.name),
                    ));
                }
            }
            let types = op.params.iter().map(|p| &p.ty).chain(std::iter::once(&op.return_type));
            for ty in types {
                for cname in ty.class_names() {
                    if !by_name.contains_key(cname) && cname != ROOT_CLASS {
                        out.push(Diagnostic::new(
                            unit,
                            op.pos,
                            Code::ResolutionError,
                            format!(
                                "type `{cname}` in signature of `{}.{}` is not declared",
                                c.name, op.name
                            ),
                        ));
                    }
                }
            }
        }
    }
    out
}

fn check_bounds(unit: &str, class: &str, feature: &str, b: Bounds, pos: Pos, out: &mut Vec<Diagnostic>) {
    let msg = match b.upper {
        Upper::Bounded(1) if b.lower > 1 => Some(format!("lower bound {} exceeds upper bound 1", b.lower)),
        Upper::Bounded(1) | Upper::Many => None,
        Upper::Bounded(u) => Some(format!("upper bound must be 1 or *, found {u}")),
    };
    if let Some(m) = msg {
        out.push(Diagnostic::new(
            unit,
            pos,
            Code::BadMultiplicity,
            format!("{m} on `{class}.{feature}`"),
        ));
    }
}

fn check_opposite(
    mm: &Metamodel,
    by_name: &HashMap<&str, &MetaClass>,
    owner: &MetaClass,
    r: &Reference,
    opp: &str,
    out: &mut Vec<Diagnostic>,
) {
    let unit = mm.source_unit.as_str();
    let Some(other) = find_reference(by_name, &r.target, opp) else {
        out.push(Diagnostic::new(
            unit,
            r.pos,
            Code::ResolutionError,
            format!(
                "opposite `{opp}` of `{}.{}` is not a reference of `{}`",
                owner.name, r.name, r.target
            ),
        ));
        return;
    };
    let mutual = other.opposite.as_deref() == Some(r.name.as_str());
    let back_ok = other.target == owner.name || supertype_closure(mm, &owner.name).contains(&other.target);
    if !mutual || !back_ok {
        let found = other.opposite.as_deref().unwrap_or("nothing");
        out.push(Diagnostic::new(
            unit,
            r.pos,
            Code::OppositeMismatch,
            format!(
                "`{}.{}` names opposite `{}.{opp}`, but that reference's opposite is `{found}` targeting `{}`",
                owner.name, r.name, r.target, other.target
            ),
        ));
    }
    if r.is_containment && other.is_containment {
        out.push(Diagnostic::new(
            unit,
            r.pos,
            Code::ContainmentOpposite,
            format!(
                "containment reference `{}.{}` has a containment opposite",
                owner.name, r.name
            ),
        ));
    }
}

/// Looks a reference up on `class` or any of its (metamodel-local) ancestors.
fn find_reference<'a>(by_name: &HashMap<&str, &'a MetaClass>, class: &str, name: &str) -> Option<&'a Reference> {
    let mut stack = vec![class];
    let mut seen = HashSet::new();
    while let Some(c) = stack.pop() {
        if !seen.insert(c) {
            continue;
        }
        let Some(mc) = by_name.get(c) else { continue };
        if let Some(r) = mc.reference(name) {
            return Some(r);
        }
        stack.extend(mc.supertypes.iter().map(String::as_str));
    }
    None
}

/// All strict ancestors of `class` declared in the metamodel. Tolerates cycles.
pub fn supertype_closure(mm: &Metamodel, class: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut stack: Vec<&str> = mm
        .class(class)
        .map(|c| c.supertypes.iter().map(String::as_str).collect())
        .unwrap_or_default();
    while let Some(s) = stack.pop() {
        if out.insert(s.to_string()) {
            if let Some(c) = mm.class(s) {
                stack.extend(c.supertypes.iter().map(String::as_str));
            }
        }
    }
    out
}

fn cycle_diagnostics(mm: &Metamodel, by_name: &HashMap<&str, &MetaClass>) -> Vec<Diagnostic> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    fn visit<'a>(
        c: &'a str,
        by_name: &HashMap<&str, &'a MetaClass>,
        marks: &mut HashMap<&'a str, Mark>,
        path: &mut Vec<&'a str>,
        cycles: &mut Vec<Vec<&'a str>>,
    ) {
        match marks.get(c) {
            Some(Mark::Done) => return,
            Some(Mark::Active) => {
                let start = path.iter().position(|p| *p == c).unwrap_or(0);
                cycles.push(path[start..].to_vec());
                return;
            }
            None => {}
        }
        let Some(mc) = by_name.get(c) else { return };
        marks.insert(c, Mark::Active);
        path.push(c);
        for s in &mc.supertypes {
            visit(s, by_name, marks, path, cycles);
        }
        path.pop();
        marks.insert(c, Mark::Done);
    }

    let mut marks = HashMap::new();
    let mut cycles = Vec::new();
    for c in &mm.classes {
        visit(&c.name, by_name, &mut marks, &mut Vec::new(), &mut cycles);
    }
    cycles
        .into_iter()
        .map(|cyc| {
            let pos = by_name.get(cyc[0]).map(|c| c.pos).unwrap_or_default();
            let mut shown: Vec<&str> = cyc.clone();
            shown.push(cyc[0]);
            Diagnostic::new(
                &mm.source_unit,
                pos,
                Code::CycleError,
                format!("supertype cycle {}", shown.join(" -> ")),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::parse_metamodel_unchecked;
    use super::*;

    fn codes(text: &str) -> Vec<Code> {
        let mm = parse_metamodel_unchecked("t.mm", text).unwrap();
        validate_metamodel(&mm).into_iter().map(|d| d.code).collect()
    }

    #[test]
    fn two_cycle() {
        assert_eq!(
            codes("metamodel m { class A extends B {} class B extends A {} }"),
            vec![Code::CycleError]
        );
    }

    #[test]
    fn self_cycle() {
        assert_eq!(codes("metamodel m { class A extends A {} }"), vec![Code::CycleError]);
    }

    #[test]
    fn non_mutual_opposite() {
        let c = codes(
            "metamodel m {
               class A { ref r: B opposite s; ref t: B; }
               class B { ref s: A opposite t; }
             }",
        );
        assert!(c.contains(&Code::OppositeMismatch), "{c:?}");
    }

    #[test]
    fn mutual_opposite_is_clean() {
        assert!(codes(
            "metamodel m {
               class A { ref r: B[*] opposite s; }
               class B { ref s: A[0..1] opposite r; }
             }"
        )
        .is_empty());
    }

    #[test]
    fn containment_on_both_ends() {
        let c = codes(
            "metamodel m {
               class A { ref r: B containment opposite s; }
               class B { ref s: A containment opposite r; }
             }",
        );
        assert!(c.contains(&Code::ContainmentOpposite), "{c:?}");
    }

    #[test]
    fn duplicate_feature_and_class() {
        let c = codes("metamodel m { class A { attr x: Int; ref x: A; } class A {} }");
        assert_eq!(c.iter().filter(|c| **c == Code::DuplicateName).count(), 2);
    }

    #[test]
    fn multiplicity_rules() {
        let c = codes("metamodel m { class A { attr x: Int[0..3]; attr y: Int[2..1]; attr z: Int[2..*]; } }");
        assert_eq!(c, vec![Code::BadMultiplicity, Code::BadMultiplicity]);
    }

    #[test]
    fn reserved_root_name() {
        assert_eq!(codes("metamodel m { class Object {} }"), vec![Code::ReservedName]);
    }

    #[test]
    fn duplicate_parameter() {
        assert_eq!(
            codes("metamodel m { class A { op f(a: Int, a: Bool); } }"),
            vec![Code::DuplicateName]
        );
    }

    #[test]
    fn inherited_opposite_target_accepted() {
        assert!(codes(
            "metamodel m {
               abstract class Node { ref out: Edge[*] opposite src; }
               class Task extends Node {}
               class Edge { ref src: Node opposite out; }
             }"
        )
        .is_empty());
    }
}
