use crate::composer::WovenModel;
use crate::diag::{Code, Diagnostic, Pos};
use crate::meta::ROOT_CLASS;
use crate::types::{CollKind, TypeRef};

use super::ast::{BinOp, CollOp, Expr, ExprKind, TypeTestKind};

/// Static environment for typing one expression or method body.
pub struct TypeContext<'a> {
    pub woven: &'a WovenModel,
    pub unit: String,
    pub self_class: String,
    /// Constraint context: no calls to user operations, no `new`, no
    /// `add`/`remove`.
    pub pure: bool,
    scopes: Vec<Vec<(String, TypeRef)>>,
}

/// Operations every object understands unless a user class defines its own.
pub fn builtin_signature(op: &str) -> Option<(Vec<TypeRef>, TypeRef)> {
    match op {
        "trace" | "fail" => Some((vec![TypeRef::string()], TypeRef::Void)),
        "container" => Some((Vec::new(), TypeRef::class(ROOT_CLASS))),
        _ => None,
    }
}

impl<'a> TypeContext<'a> {
    pub fn new(woven: &'a WovenModel, unit: &str, self_class: &str, pure: bool) -> Self {
        TypeContext {
            woven,
            unit: unit.to_string(),
            self_class: self_class.to_string(),
            pure,
            scopes: vec![Vec::new()],
        }
    }

    pub fn push(&mut self) {
        self.scopes.push(Vec::new());
    }

    pub fn pop(&mut self) {
        self.scopes.pop();
    }

    pub fn declare(&mut self, name: impl Into<String>, ty: TypeRef) {
        if let Some(s) = self.scopes.last_mut() {
            s.push((name.into(), ty));
        }
    }

    pub fn lookup(&self, name: &str) -> Option<&TypeRef> {
        self.scopes
            .iter()
            .rev()
            .flat_map(|s| s.iter().rev())
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }

    pub fn error(&self, pos: Pos, code: Code, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::new(&self.unit, pos, code, msg)
    }

    pub fn conforms(&self, actual: &TypeRef, expected: &TypeRef) -> bool {
        self.woven.type_conforms(actual, expected)
    }
}

type TResult = Result<TypeRef, Diagnostic>;

pub fn typecheck_expr(cx: &mut TypeContext, e: &Expr) -> TResult {
    match &e.kind {
        ExprKind::SelfRef => Ok(TypeRef::class(cx.self_class.clone())),
        ExprKind::Var(n) => cx
            .lookup(n)
            .cloned()
            .ok_or_else(|| cx.error(e.pos, Code::ResolutionError, format!("unknown variable `{n}`"))),
        ExprKind::Int(_) => Ok(TypeRef::int()),
        ExprKind::Bool(_) => Ok(TypeRef::bool()),
        ExprKind::Str(_) => Ok(TypeRef::string()),
        ExprKind::Void => Ok(TypeRef::Void),
        ExprKind::Nav { receiver, feature } => {
            let rt = typecheck_expr(cx, receiver)?;
            let TypeRef::Class(c) = &rt else {
                return Err(cx.error(e.pos, Code::TypeError, format!("cannot navigate `.{feature}` on {rt}")));
            };
            cx.woven.feature(c, feature).map(|f| f.value_type()).ok_or_else(|| {
                cx.error(
                    e.pos,
                    Code::UnknownFeature,
                    format!("class `{c}` has no feature `{feature}`"),
                )
            })
        }
        ExprKind::Call {
            receiver,
            op,
            args,
            qualifier,
        } => {
            let rt = typecheck_expr(cx, receiver)?;
            let TypeRef::Class(c) = &rt else {
                return Err(cx.error(e.pos, Code::TypeError, format!("cannot call `{op}` on {rt}")));
            };
            let (params, ret) = resolve_call(cx, e.pos, c, op, qualifier.as_deref())?;
            if cx.pure && op != "container" {
                return Err(cx.error(
                    e.pos,
                    Code::TypeError,
                    format!("call of `{op}` is not allowed in a constraint"),
                ));
            }
            check_args(cx, e.pos, op, &params, args)?;
            Ok(ret)
        }
        ExprKind::Coll {
            receiver,
            op,
            args,
            lambda,
        } => {
            let rt = typecheck_expr(cx, receiver)?;
            let TypeRef::Coll(kind, elem) = &rt else {
                return Err(cx.error(
                    e.pos,
                    Code::TypeError,
                    format!("collection operation `{}` on {rt}", op.name()),
                ));
            };
            let (kind, elem) = (*kind, elem.as_ref().clone());
            if op.mutates() {
                if cx.pure {
                    return Err(cx.error(
                        e.pos,
                        Code::TypeError,
                        format!("`{}` is not allowed in a constraint", op.name()),
                    ));
                }
                if !receiver.is_lvalue() {
                    return Err(cx.error(
                        e.pos,
                        Code::TypeError,
                        format!("`{}` needs a variable or feature receiver", op.name()),
                    ));
                }
            }
            let body_ty = match lambda {
                Some(l) => {
                    cx.push();
                    cx.declare(l.param.clone(), elem.clone());
                    let t = typecheck_expr(cx, &l.body);
                    cx.pop();
                    Some((t?, l.body.pos))
                }
                None => None,
            };
            let expect_bool = |cx: &TypeContext, bt: &Option<(TypeRef, Pos)>| -> Result<(), Diagnostic> {
                match bt {
                    Some((t, _)) if *t == TypeRef::bool() => Ok(()),
                    Some((t, p)) => Err(cx.error(
                        *p,
                        Code::TypeError,
                        format!("`{}` body must be Bool, found {t}", op.name()),
                    )),
                    None => Ok(()),
                }
            };
            match op {
                CollOp::Collect => Ok(TypeRef::coll(
                    CollKind::Sequence,
                    body_ty.map(|b| b.0).unwrap_or(TypeRef::Void),
                )),
                CollOp::Select | CollOp::Reject => {
                    expect_bool(cx, &body_ty)?;
                    Ok(rt.clone())
                }
                CollOp::ForAll | CollOp::Exists => {
                    expect_bool(cx, &body_ty)?;
                    Ok(TypeRef::bool())
                }
                CollOp::Each => Ok(TypeRef::Void),
                CollOp::IsEmpty | CollOp::NotEmpty => Ok(TypeRef::bool()),
                CollOp::Size => Ok(TypeRef::int()),
                CollOp::First | CollOp::Last => Ok(elem),
                CollOp::Includes | CollOp::Add | CollOp::Remove => {
                    let at = typecheck_expr(cx, &args[0])?;
                    if !cx.conforms(&at, &elem) && !cx.conforms(&elem, &at) {
                        return Err(cx.error(
                            args[0].pos,
                            Code::TypeError,
                            format!("`{}` expects {elem}, found {at}", op.name()),
                        ));
                    }
                    if *op == CollOp::Includes {
                        Ok(TypeRef::bool())
                    } else {
                        if !cx.conforms(&at, &elem) {
                            return Err(cx.error(args[0].pos, Code::TypeError, format!("cannot add {at} to {rt}")));
                        }
                        Ok(TypeRef::Void)
                    }
                }
                CollOp::Intersection => {
                    let at = typecheck_expr(cx, &args[0])?;
                    match &at {
                        TypeRef::Coll(_, other) if cx.conforms(other, &elem) || cx.conforms(&elem, other) => {
                            Ok(TypeRef::coll(kind, elem))
                        }
                        _ => Err(cx.error(args[0].pos, Code::TypeError, format!("cannot intersect {rt} with {at}"))),
                    }
                }
            }
        }
        ExprKind::TypeTest { receiver, kind, target } => {
            let rt = typecheck_expr(cx, receiver)?;
            if !matches!(rt, TypeRef::Class(_) | TypeRef::Void) {
                return Err(cx.error(e.pos, Code::TypeError, format!("type test on {rt}")));
            }
            if cx.woven.class(target).is_none() {
                return Err(cx.error(e.pos, Code::ResolutionError, format!("unknown class `{target}`")));
            }
            Ok(match kind {
                TypeTestKind::KindOf => TypeRef::bool(),
                TypeTestKind::AsType => TypeRef::class(target.clone()),
            })
        }
        ExprKind::Bin { lhs, op, rhs } => {
            let a = typecheck_expr(cx, lhs)?;
            let b = typecheck_expr(cx, rhs)?;
            bin_type(cx, e.pos, *op, &a, &b)
        }
        ExprKind::Not(inner) => {
            let t = typecheck_expr(cx, inner)?;
            if t != TypeRef::bool() {
                return Err(cx.error(e.pos, Code::TypeError, format!("`not` expects Bool, found {t}")));
            }
            Ok(t)
        }
        ExprKind::If { cond, then, els } => {
            let c = typecheck_expr(cx, cond)?;
            if c != TypeRef::bool() {
                return Err(cx.error(cond.pos, Code::TypeError, format!("condition must be Bool, found {c}")));
            }
            let a = typecheck_expr(cx, then)?;
            let b = typecheck_expr(cx, els)?;
            if cx.conforms(&a, &b) {
                Ok(b)
            } else if cx.conforms(&b, &a) {
                Ok(a)
            } else {
                Err(cx.error(
                    e.pos,
                    Code::TypeError,
                    format!("branches have unrelated types {a} and {b}"),
                ))
            }
        }
        ExprKind::New(class) => {
            if cx.pure {
                return Err(cx.error(e.pos, Code::TypeError, "object creation is not allowed in a constraint"));
            }
            match cx.woven.class(class) {
                None => Err(cx.error(e.pos, Code::ResolutionError, format!("unknown class `{class}`"))),
                Some(c) if c.is_abstract => Err(cx.error(
                    e.pos,
                    Code::TypeError,
                    format!("cannot instantiate abstract class `{class}`"),
                )),
                Some(_) => Ok(TypeRef::class(class.clone())),
            }
        }
    }
}

/// Parameter and return types of `op` called on an instance of `class`,
/// optionally through a qualifier naming one of its ancestors.
pub(crate) fn resolve_call(
    cx: &TypeContext,
    pos: Pos,
    class: &str,
    op: &str,
    qualifier: Option<&str>,
) -> Result<(Vec<TypeRef>, TypeRef), Diagnostic> {
    let lookup_class = match qualifier {
        Some(q) => {
            if !cx.woven.conforms(class, q) {
                return Err(cx.error(pos, Code::TypeError, format!("`{q}` is not a supertype of `{class}`")));
            }
            q
        }
        None => class,
    };
    if let Some(s) = cx.woven.signature(lookup_class, op) {
        return Ok((
            s.sig.params.iter().map(|p| p.ty.clone()).collect(),
            s.sig.return_type.clone(),
        ));
    }
    if qualifier.is_none() {
        if let Some(b) = builtin_signature(op) {
            return Ok(b);
        }
    }
    Err(cx.error(
        pos,
        Code::UnknownMethod,
        format!("class `{lookup_class}` has no operation `{op}`"),
    ))
}

pub(crate) fn check_args(
    cx: &mut TypeContext,
    pos: Pos,
    op: &str,
    params: &[TypeRef],
    args: &[Expr],
) -> Result<(), Diagnostic> {
    if params.len() != args.len() {
        return Err(cx.error(
            pos,
            Code::ArityMismatch,
            format!("`{op}` takes {} argument(s), found {}", params.len(), args.len()),
        ));
    }
    for (p, a) in params.iter().zip(args) {
        let at = typecheck_expr(cx, a)?;
        if !cx.conforms(&at, p) {
            return Err(cx.error(
                a.pos,
                Code::TypeError,
                format!("argument of `{op}` expects {p}, found {at}"),
            ));
        }
    }
    Ok(())
}

fn bin_type(cx: &TypeContext, pos: Pos, op: BinOp, a: &TypeRef, b: &TypeRef) -> TResult {
    let int = TypeRef::int();
    let string = TypeRef::string();
    let boolean = TypeRef::bool();
    let ok = match op {
        BinOp::And | BinOp::Or => (*a == boolean && *b == boolean).then(|| boolean.clone()),
        BinOp::Eq | BinOp::Ne => (cx.conforms(a, b) || cx.conforms(b, a)).then(|| boolean.clone()),
        BinOp::Add if *a == string && *b == string => Some(string.clone()),
        BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div => (*a == int && *b == int).then(|| int.clone()),
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
            ((*a == int && *b == int) || (*a == string && *b == string)).then(|| boolean.clone())
        }
    };
    ok.ok_or_else(|| {
        cx.error(
            pos,
            Code::TypeError,
            format!("operator `{}` is not defined on {a} and {b}", op.symbol()),
        )
    })
}
