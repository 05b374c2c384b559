//! The static-semantics concern: invariants on classes and pre/postconditions
//! on operations, attached through `aspect class` blocks.

use std::sync::Arc;

use crate::composer::WovenModel;
use crate::diag::{Code, Diagnostic, Pos};
use crate::expr::{eval_expr, typecheck_expr, Env, ExprRef, PureHost, TypeContext, Value};
use crate::runtime::{Fault, ModelInstance, ObjId};
use crate::syntax::Parser;
use crate::types::TypeRef;

/// A named boolean clause and the unit that contributed it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedClause {
    pub name: String,
    pub body: ExprRef,
    pub unit: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpClause {
    pub op: String,
    pub clause: NamedClause,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractContribution {
    pub class_name: String,
    pub invariants: Vec<NamedClause>,
    pub pre: Vec<OpClause>,
    pub post: Vec<OpClause>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractModule {
    pub package: String,
    pub requires: Vec<String>,
    pub contributions: Vec<ContractContribution>,
    pub source_unit: String,
}

pub fn parse_contracts(unit: &str, text: &str) -> Result<ContractModule, Diagnostic> {
    let mut p = Parser::new(unit, text)?;
    let (package, requires) = p.parse_unit_header()?;
    let mut contributions = Vec::new();
    while !p.at_eof() {
        let pos = p.pos();
        p.expect_kw("aspect")?;
        p.expect_kw("class")?;
        let class_name = p.expect_ident()?;
        p.expect_sym("{")?;
        let mut c = ContractContribution {
            class_name,
            invariants: Vec::new(),
            pre: Vec::new(),
            post: Vec::new(),
            pos,
        };
        loop {
            let cpos = p.pos();
            if p.eat_sym("}") {
                break;
            }
            let kind = if p.eat_kw("inv") {
                "inv"
            } else if p.eat_kw("pre") {
                "pre"
            } else if p.eat_kw("post") {
                "post"
            } else {
                return Err(p.error("expected `inv`, `pre`, `post` or `}`"));
            };
            let name = p.expect_ident()?;
            let op = if kind == "inv" {
                None
            } else {
                p.expect_kw("on")?;
                Some(p.expect_ident()?)
            };
            p.expect_sym(":")?;
            let body = p.parse_expr()?;
            p.eat_sym(";");
            let clause = NamedClause {
                name,
                body: Arc::new(body),
                unit: unit.to_string(),
                pos: cpos,
            };
            match (kind, op) {
                ("inv", _) => c.invariants.push(clause),
                ("pre", Some(op)) => c.pre.push(OpClause { op, clause }),
                (_, Some(op)) => c.post.push(OpClause { op, clause }),
                _ => unreachable!("op parsed for pre/post"),
            }
        }
        contributions.push(c);
    }
    Ok(ContractModule {
        package,
        requires,
        contributions,
        source_unit: unit.to_string(),
    })
}

/// Types every clause of the module against the woven model: bodies must be
/// side-effect free and of type Bool.
pub fn typecheck_contracts(cm: &ContractModule, woven: &WovenModel) -> Vec<Diagnostic> {
    let unit = &cm.source_unit;
    let mut out = Vec::new();
    for c in &cm.contributions {
        let Some(wc) = woven.class(&c.class_name) else {
            out.push(Diagnostic::new(
                unit,
                c.pos,
                Code::ResolutionError,
                format!("aspect targets unknown class `{}`", c.class_name),
            ));
            continue;
        };
        for inv in &c.invariants {
            let mut cx = TypeContext::new(woven, unit, &c.class_name, true);
            check_bool(&mut cx, inv, &mut out);
        }
        for (is_post, oc) in c.pre.iter().map(|x| (false, x)).chain(c.post.iter().map(|x| (true, x))) {
            let Some(sig) = wc.signatures.get(&oc.op) else {
                out.push(Diagnostic::new(
                    unit,
                    oc.clause.pos,
                    Code::UnknownMethod,
                    format!("class `{}` has no operation `{}`", c.class_name, oc.op),
                ));
                continue;
            };
            let mut cx = TypeContext::new(woven, unit, &c.class_name, true);
            for p in &sig.sig.params {
                cx.declare(p.name.clone(), p.ty.clone());
            }
            if is_post && sig.sig.return_type != TypeRef::Void {
                cx.declare("result", sig.sig.return_type.clone());
            }
            check_bool(&mut cx, &oc.clause, &mut out);
        }
    }
    out
}

fn check_bool(cx: &mut TypeContext, clause: &NamedClause, out: &mut Vec<Diagnostic>) {
    match typecheck_expr(cx, &clause.body) {
        Ok(t) if t == TypeRef::bool() => {}
        Ok(t) => out.push(cx.error(
            clause.pos,
            Code::TypeError,
            format!("`{}` must be Bool, found {t}", clause.name),
        )),
        Err(d) => out.push(d),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckResult {
    Holds,
    Violated { name: String, obj: ObjId },
    Error { name: String, obj: ObjId, fault: Fault },
}

impl CheckResult {
    pub fn holds(&self) -> bool {
        matches!(self, CheckResult::Holds)
    }
}

/// Evaluates a clause with `self` and extra bindings, without side effects.
pub fn eval_clause(
    woven: &WovenModel,
    model: &ModelInstance,
    clause: &NamedClause,
    self_obj: ObjId,
    bindings: &[(String, Value)],
) -> Result<bool, Fault> {
    let mut host = PureHost { woven, model };
    let mut env = Env::new(Value::Obj(self_obj));
    for (n, v) in bindings {
        env.declare(n.clone(), v.clone());
    }
    match eval_expr(&mut host, &mut env, &clause.body)? {
        Value::Bool(b) => Ok(b),
        other => Err(Fault::TypeFault(format!(
            "`{}` evaluated to {}, not Bool",
            clause.name,
            other.type_name()
        ))),
    }
}

pub fn check_invariant(woven: &WovenModel, model: &ModelInstance, inv: &NamedClause, obj: ObjId) -> CheckResult {
    match eval_clause(woven, model, inv, obj, &[]) {
        Ok(true) => CheckResult::Holds,
        Ok(false) => CheckResult::Violated {
            name: inv.name.clone(),
            obj,
        },
        Err(fault) => CheckResult::Error {
            name: inv.name.clone(),
            obj,
            fault,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::ExprKind;

    const LISTING: &str = "package fuml;
require \"fuml.ecore\"
aspect class CreateObjectAction {
// The given classifier must be a class.
inv fUML_is_class :
  self.classifier.oclIsKindOf(Class)
}
";

    #[test]
    fn parses_the_create_object_action_invariant_verbatim() {
        let cm = parse_contracts("fuml.ocl", LISTING).unwrap();
        assert_eq!(cm.package, "fuml");
        assert_eq!(cm.requires, vec!["fuml.ecore"]);
        assert_eq!(cm.contributions.len(), 1);
        let c = &cm.contributions[0];
        assert_eq!(c.class_name, "CreateObjectAction");
        assert_eq!(c.invariants.len(), 1);
        assert_eq!(c.invariants[0].name, "fUML_is_class");
        assert!(matches!(c.invariants[0].body.kind, ExprKind::TypeTest { .. }));
    }

    #[test]
    fn empty_module() {
        let cm = parse_contracts("e.inv", "package p; require \"m.mm\";").unwrap();
        assert!(cm.contributions.is_empty());
    }

    #[test]
    fn non_bool_invariant_parses() {
        let cm = parse_contracts(
            "b.inv",
            "package p; require \"m.mm\"; aspect class A { inv bad: 1 + 2; }",
        )
        .unwrap();
        assert_eq!(cm.contributions[0].invariants[0].name, "bad");
    }

    #[test]
    fn pre_and_post_name_their_operation() {
        let cm = parse_contracts(
            "c.inv",
            "package p; require \"m.mm\";
             aspect class A { pre positive on run: n > 0; post done on run: result; }",
        )
        .unwrap();
        let c = &cm.contributions[0];
        assert_eq!(c.pre[0].op, "run");
        assert_eq!(c.post[0].clause.name, "done");
    }

    #[test]
    fn missing_require_is_a_syntax_error() {
        let e = parse_contracts("x.inv", "package p; aspect class A {}").unwrap_err();
        assert_eq!(e.code, Code::SyntaxError);
    }
}
