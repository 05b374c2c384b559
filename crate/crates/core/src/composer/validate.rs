use std::collections::HashSet;

use crate::diag::{Code, Diagnostic, Pos};
use crate::meta::Feature;

use super::woven::WovenModel;

/// Structural checks on a woven model: every mentioned type exists, every
/// linearization lists each class once, and opposites (including those of
/// aspect-added references) are mutual.
pub fn validate_woven(w: &WovenModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for c in w.ordered_classes() {
        let mut seen = HashSet::new();
        if c.linearization.first() != Some(&c.name) || !c.linearization.iter().all(|l| seen.insert(l)) {
            out.push(Diagnostic::new(
                c.base_unit.clone().unwrap_or_default(),
                Pos::default(),
                Code::LinearizationError,
                format!(
                    "linearization of `{}` is malformed: {}",
                    c.name,
                    c.linearization.join(", ")
                ),
            ));
        }
        for l in &c.linearization {
            if w.class(l).is_none() {
                out.push(closure(
                    c.base_unit.as_deref(),
                    Pos::default(),
                    format!("`{}` inherits unknown `{l}`", c.name),
                ));
            }
        }
        for name in &c.own_features {
            let wf = &c.features[name];
            let Feature::Ref(r) = &wf.feature else { continue };
            if w.class(&r.target).is_none() {
                out.push(closure(
                    Some(&wf.unit),
                    r.pos,
                    format!("reference `{}.{}` targets unknown class `{}`", c.name, r.name, r.target),
                ));
                continue;
            }
            let Some(opp) = &r.opposite else { continue };
            let back = w.feature(&r.target, opp).and_then(Feature::as_ref);
            let ok = back.is_some_and(|b| {
                b.opposite.as_deref() == Some(r.name.as_str())
                    && w.conforms(&c.name, &b.target)
                    && !(b.is_containment && r.is_containment)
            });
            if !ok {
                out.push(Diagnostic::new(
                    &wf.unit,
                    r.pos,
                    Code::OppositeMismatch,
                    format!(
                        "`{}.{}` names opposite `{}.{opp}`, which does not point back",
                        c.name, r.name, r.target
                    ),
                ));
            }
        }
        for (op, s) in &c.signatures {
            let types = s
                .sig
                .params
                .iter()
                .map(|p| &p.ty)
                .chain(std::iter::once(&s.sig.return_type));
            for t in types {
                if !w.type_exists(t) {
                    out.push(closure(
                        c.base_unit.as_deref(),
                        s.sig.pos,
                        format!("signature of `{}.{op}` mentions unknown type `{t}`", c.name),
                    ));
                }
            }
        }
    }
    out
}

fn closure(unit: Option<&str>, pos: Pos, msg: String) -> Diagnostic {
    Diagnostic::new(unit.unwrap_or_default(), pos, Code::ClosureError, msg)
}
