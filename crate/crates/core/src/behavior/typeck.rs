use crate::composer::{WovenClass, WovenModel};
use crate::diag::{Code, Diagnostic};
use crate::expr::{typecheck_expr, TypeContext};
use crate::meta::OperationSig;
use crate::types::TypeRef;

use super::{BehaviorModule, LoopCond, MethodDef, Stmt, StmtKind};

/// Checks override intent and types every method body of the module against
/// the woven class table.
pub fn typecheck_behavior(bm: &BehaviorModule, woven: &WovenModel) -> Vec<Diagnostic> {
    let unit = bm.source_unit.as_str();
    let mut out = Vec::new();
    for a in &bm.aspects {
        let Some(wc) = woven.class(&a.class_name) else {
            out.push(Diagnostic::new(
                unit,
                a.pos,
                Code::ResolutionError,
                format!("aspect targets unknown class `{}`", a.class_name),
            ));
            continue;
        };
        for m in &a.methods {
            check_override(unit, woven, wc, m, &mut out);
            let mut bad_types = false;
            for ty in m.sig.params.iter().map(|p| &p.ty).chain([&m.sig.return_type]) {
                if !woven.type_exists(ty) {
                    bad_types = true;
                    out.push(Diagnostic::new(
                        unit,
                        m.sig.pos,
                        Code::ResolutionError,
                        format!("unknown type `{ty}` in signature of `{}.{}`", wc.name, m.sig.name),
                    ));
                }
            }
            if bad_types {
                continue;
            }
            let mut cx = TypeContext::new(woven, unit, &wc.name, false);
            for p in &m.sig.params {
                cx.declare(p.name.clone(), p.ty.clone());
            }
            let mut bc = BodyCheck {
                cx,
                class: wc,
                method: m,
                out: &mut out,
            };
            bc.block(&m.body);
        }
    }
    out
}

/// Signature of `op` as inherited from a strict ancestor of `wc`, or
/// declared by `wc`'s own metamodel definition.
fn inherited_signature<'a>(woven: &'a WovenModel, wc: &'a WovenClass, op: &str) -> Option<&'a OperationSig> {
    if let Some(s) = wc.own_signatures.get(op) {
        return Some(s);
    }
    wc.linearization.iter().skip(1).find_map(|anc| {
        let ac = woven.class(anc)?;
        ac.own_signatures
            .get(op)
            .or_else(|| ac.own_methods.get(op).map(|e| &e.method.sig))
    })
}

fn check_override(unit: &str, woven: &WovenModel, wc: &WovenClass, m: &MethodDef, out: &mut Vec<Diagnostic>) {
    let inherited = inherited_signature(woven, wc, &m.sig.name);
    match (m.overrides, inherited) {
        (true, None) => out.push(Diagnostic::new(
            unit,
            m.sig.pos,
            Code::OverrideError,
            format!(
                "`method {}` in `{}` reopens no declared or inherited operation; use `operation`",
                m.sig.name, wc.name
            ),
        )),
        (true, Some(s)) if !s.same_shape(&m.sig) => out.push(Diagnostic::new(
            unit,
            m.sig.pos,
            Code::OverrideError,
            format!("`{}.{}` does not match the inherited signature", wc.name, m.sig.name),
        )),
        (false, Some(_)) => out.push(Diagnostic::new(
            unit,
            m.sig.pos,
            Code::OverrideError,
            format!(
                "`operation {}` in `{}` redefines an existing operation; use `method`",
                m.sig.name, wc.name
            ),
        )),
        _ => {}
    }
}

struct BodyCheck<'a, 'b> {
    cx: TypeContext<'a>,
    class: &'a WovenClass,
    method: &'a MethodDef,
    out: &'b mut Vec<Diagnostic>,
}

impl BodyCheck<'_, '_> {
    fn block(&mut self, stmts: &[Stmt]) {
        self.cx.push();
        for s in stmts {
            self.stmt(s);
        }
        self.cx.pop();
    }

    fn expr(&mut self, e: &crate::expr::Expr) -> Option<TypeRef> {
        match typecheck_expr(&mut self.cx, e) {
            Ok(t) => Some(t),
            Err(d) => {
                self.out.push(d);
                None
            }
        }
    }

    fn expect(&mut self, e: &crate::expr::Expr, want: &TypeRef, what: &str) {
        if let Some(t) = self.expr(e) {
            if !self.cx.conforms(&t, want) {
                self.out.push(
                    self.cx
                        .error(e.pos, Code::TypeError, format!("{what} expects {want}, found {t}")),
                );
            }
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::VarDecl { name, ty, init } => {
                if !self.cx.woven.type_exists(ty) {
                    self.out.push(
                        self.cx
                            .error(s.pos, Code::ResolutionError, format!("unknown type `{ty}`")),
                    );
                } else if let Some(e) = init {
                    self.expect(e, ty, &format!("variable `{name}`"));
                }
                self.cx.declare(name.clone(), ty.clone());
            }
            StmtKind::Assign { target, value } => {
                if let Some(tt) = self.expr(target) {
                    self.expect(value, &tt, "assignment");
                }
            }
            StmtKind::Expr(e) => {
                self.expr(e);
            }
            StmtKind::If { cond, then, els } => {
                self.expect(cond, &TypeRef::bool(), "condition");
                self.block(then);
                self.block(els);
            }
            StmtKind::Loop { init, cond, body } => {
                self.cx.push();
                for st in init {
                    self.stmt(st);
                }
                let c = match cond {
                    LoopCond::Until(c) | LoopCond::While(c) => c,
                };
                self.expect(c, &TypeRef::bool(), "loop condition");
                self.block(body);
                self.cx.pop();
            }
            StmtKind::Each { receiver, param, body } => {
                let elem = match self.expr(receiver) {
                    Some(TypeRef::Coll(_, e)) => *e,
                    Some(t) => {
                        self.out
                            .push(self.cx.error(receiver.pos, Code::TypeError, format!("`each` over {t}")));
                        return;
                    }
                    None => return,
                };
                self.cx.push();
                self.cx.declare(param.clone(), elem);
                self.block(body);
                self.cx.pop();
            }
            StmtKind::Return(e) => {
                let ret = self.method.sig.return_type.clone();
                match (e, &ret) {
                    (None, TypeRef::Void) => {}
                    (None, _) => self.out.push(self.cx.error(
                        s.pos,
                        Code::TypeError,
                        format!("`return` needs a {ret} value"),
                    )),
                    (Some(e), TypeRef::Void) => {
                        self.expr(e);
                        self.out.push(
                            self.cx
                                .error(s.pos, Code::TypeError, "`return` with a value in a Void method"),
                        );
                    }
                    (Some(e), _) => self.expect(e, &ret, "`return`"),
                }
            }
            StmtKind::SuperCall { qualifier, args } => self.super_call(s, qualifier.as_deref(), args),
        }
    }

    fn super_call(&mut self, s: &Stmt, qualifier: Option<&str>, args: &[crate::expr::Expr]) {
        let op = &self.method.sig.name;
        let class = self.class;
        let target = match qualifier {
            Some(q) => {
                if !class.supertypes.iter().any(|st| st == q) {
                    self.out.push(self.cx.error(
                        s.pos,
                        Code::TypeError,
                        format!("`super[{q}]`: `{q}` is not a direct supertype of `{}`", class.name),
                    ));
                    return;
                }
                self.cx.woven.class(q).and_then(|qc| qc.dispatch(op))
            }
            None => class.method_table.get(op).and_then(|entries| {
                let at = entries.iter().position(|e| e.defining_class == class.name)?;
                entries.get(at + 1)
            }),
        };
        let Some(entry) = target else {
            self.out.push(self.cx.error(
                s.pos,
                Code::UnknownMethod,
                format!("no inherited definition of `{op}` for `super` in `{}`", class.name),
            ));
            return;
        };
        let params: Vec<TypeRef> = entry.method.sig.params.iter().map(|p| p.ty.clone()).collect();
        if let Err(d) = crate::expr::check_call_args(&mut self.cx, s.pos, op, &params, args) {
            self.out.push(d);
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::composer::compose_sources;
    use crate::diag::Code;

    const MM: &str = "metamodel m {
        class Pin extends ObjectNode { ref owner: Holder[0..1]; }
        abstract class ObjectNode { attr name: String; }
        abstract class MultiplicityElement { attr lower: Int; attr upper: Int; }
        class InputPinActivation { ref node: Pin[0..1]; }
        class Holder { attr count: Int; op bump(by: Int): Int; }
    }";

    fn check(act: &str) -> Vec<Code> {
        let full = format!("package t; require \"m.mm\";\n{act}");
        match compose_sources(&[("m.mm", MM), ("t.act", &full)]) {
            Ok(_) => Vec::new(),
            Err(ds) => ds.into_iter().map(|d| d.code).collect(),
        }
    }

    #[test]
    fn woven_supertype_feature_is_visible() {
        let codes = check(
            "aspect class Pin inherits ObjectNode, MultiplicityElement {}
             aspect class InputPinActivation {
               operation isReady() : Boolean is do
                 var minimum : Integer init self.node.lower
                 return minimum > 0
               end
             }",
        );
        assert!(codes.is_empty(), "{codes:?}");
    }

    #[test]
    fn feature_missing_without_the_added_supertype() {
        let codes = check(
            "aspect class InputPinActivation {
               operation isReady() : Boolean is do
                 var minimum : Integer init self.node.lower
                 return true
               end
             }",
        );
        assert_eq!(codes, vec![Code::UnknownFeature]);
    }

    #[test]
    fn qualified_super_must_name_a_direct_supertype() {
        let codes = check("aspect class Holder { method bump(by: Int): Int is do super[Pin](by) return 0 end }");
        assert_eq!(codes, vec![Code::TypeError]);
    }

    #[test]
    fn string_into_int_attribute() {
        let codes = check("aspect class Holder { method bump(by: Int): Int is do self.count := \"x\" return 1 end }");
        assert_eq!(codes, vec![Code::TypeError]);
    }

    #[test]
    fn override_intent_is_checked() {
        assert_eq!(
            check("aspect class Holder { operation bump(by: Int): Int is do return by end }"),
            vec![Code::OverrideError]
        );
        assert_eq!(
            check("aspect class Holder { method fresh() is do end }"),
            vec![Code::OverrideError]
        );
        assert_eq!(
            check("aspect class Holder { method bump(by: Bool): Int is do return 1 end }"),
            vec![Code::OverrideError]
        );
    }

    #[test]
    fn return_type_mismatch() {
        assert_eq!(
            check("aspect class Holder { method bump(by: Int): Int is do return true end }"),
            vec![Code::TypeError]
        );
    }
}
