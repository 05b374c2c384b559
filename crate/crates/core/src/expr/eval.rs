use crate::composer::WovenModel;
use crate::runtime::{Fault, ModelInstance, ObjId};
use crate::types::CollKind;

use super::ast::{BinOp, CollOp, Expr, ExprKind, Lambda, TypeTestKind};
use super::value::{Collection, Value};

/// What the evaluator needs from its surroundings. Pure evaluation (for
/// constraints) uses `PureHost`; the interpreter supplies calls, creation and
/// model mutation.
pub trait Host {
    fn woven(&self) -> &WovenModel;
    fn model(&self) -> &ModelInstance;
    fn call(&mut self, recv: ObjId, op: &str, qualifier: Option<&str>, args: Vec<Value>) -> Result<Value, Fault>;
    fn create(&mut self, class: &str) -> Result<ObjId, Fault>;
    fn add(&mut self, obj: ObjId, feature: &str, value: Value) -> Result<(), Fault>;
    fn remove(&mut self, obj: ObjId, feature: &str, value: &Value) -> Result<(), Fault>;
}

/// Read-only host: any side effect is a fault.
pub struct PureHost<'a> {
    pub woven: &'a WovenModel,
    pub model: &'a ModelInstance,
}

impl Host for PureHost<'_> {
    fn woven(&self) -> &WovenModel {
        self.woven
    }

    fn model(&self) -> &ModelInstance {
        self.model
    }

    fn call(&mut self, _recv: ObjId, op: &str, _q: Option<&str>, _args: Vec<Value>) -> Result<Value, Fault> {
        Err(Fault::SideEffect(format!("call of `{op}`")))
    }

    fn create(&mut self, class: &str) -> Result<ObjId, Fault> {
        Err(Fault::SideEffect(format!("{class}.new()")))
    }

    fn add(&mut self, _obj: ObjId, feature: &str, _value: Value) -> Result<(), Fault> {
        Err(Fault::SideEffect(format!("add to `{feature}`")))
    }

    fn remove(&mut self, _obj: ObjId, feature: &str, _value: &Value) -> Result<(), Fault> {
        Err(Fault::SideEffect(format!("remove from `{feature}`")))
    }
}

/// Variable bindings: `self` plus a stack of lexical frames.
#[derive(Debug, Clone)]
pub struct Env {
    pub self_val: Value,
    frames: Vec<Vec<(String, Value)>>,
}

impl Env {
    pub fn new(self_val: Value) -> Self {
        Env {
            self_val,
            frames: vec![Vec::new()],
        }
    }

    pub fn push(&mut self) {
        self.frames.push(Vec::new());
    }

    pub fn pop(&mut self) {
        self.frames.pop();
        debug_assert!(!self.frames.is_empty());
    }

    pub fn declare(&mut self, name: impl Into<String>, v: Value) {
        if let Some(f) = self.frames.last_mut() {
            f.push((name.into(), v));
        }
    }

    pub fn lookup(&self, name: &str) -> Option<&Value> {
        self.frames
            .iter()
            .rev()
            .flat_map(|f| f.iter().rev())
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
    }

    pub fn lookup_mut(&mut self, name: &str) -> Option<&mut Value> {
        self.frames
            .iter_mut()
            .rev()
            .flat_map(|f| f.iter_mut().rev())
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
    }
}

pub fn eval_expr<H: Host + ?Sized>(host: &mut H, env: &mut Env, e: &Expr) -> Result<Value, Fault> {
    match &e.kind {
        ExprKind::SelfRef => Ok(env.self_val.clone()),
        ExprKind::Var(n) => env.lookup(n).cloned().ok_or_else(|| Fault::UnboundVariable(n.clone())),
        ExprKind::Int(i) => Ok(Value::Int(*i)),
        ExprKind::Bool(b) => Ok(Value::Bool(*b)),
        ExprKind::Str(s) => Ok(Value::Str(s.clone())),
        ExprKind::Void => Ok(Value::Void),
        ExprKind::Nav { receiver, feature } => match eval_expr(host, env, receiver)? {
            Value::Void => Ok(Value::Void),
            Value::Obj(o) => host.model().get(o, feature).cloned(),
            other => Err(Fault::TypeFault(format!(
                "navigation `.{feature}` on {}",
                other.type_name()
            ))),
        },
        ExprKind::Call {
            receiver,
            op,
            args,
            qualifier,
        } => {
            let recv = eval_expr(host, env, receiver)?;
            let mut argv = Vec::with_capacity(args.len());
            for a in args {
                argv.push(eval_expr(host, env, a)?);
            }
            match recv {
                Value::Void => Err(Fault::VoidCall(op.clone())),
                Value::Obj(o) => {
                    if op == "container" && argv.is_empty() && !has_user_op(host.woven(), host.model(), o, op) {
                        return Ok(host.model().container(o).map_or(Value::Void, Value::Obj));
                    }
                    host.call(o, op, qualifier.as_deref(), argv)
                }
                other => Err(Fault::TypeFault(format!("call of `{op}` on {}", other.type_name()))),
            }
        }
        ExprKind::Coll {
            receiver,
            op,
            args,
            lambda,
        } => eval_coll(host, env, receiver, *op, args, lambda.as_deref()),
        ExprKind::TypeTest { receiver, kind, target } => {
            let v = eval_expr(host, env, receiver)?;
            match (kind, v) {
                (TypeTestKind::KindOf, Value::Obj(o)) => {
                    Ok(Value::Bool(host.woven().conforms(host.model().class_of(o), target)))
                }
                (TypeTestKind::KindOf, _) => Ok(Value::Bool(false)),
                (TypeTestKind::AsType, Value::Void) => Ok(Value::Void),
                (TypeTestKind::AsType, Value::Obj(o)) => {
                    let class = host.model().class_of(o);
                    if host.woven().conforms(class, target) {
                        Ok(Value::Obj(o))
                    } else {
                        Err(Fault::TypeFault(format!(
                            "{} of class {class} is not a {target}",
                            host.model().label(o)
                        )))
                    }
                }
                (TypeTestKind::AsType, other) => Err(Fault::TypeFault(format!(
                    "cannot cast {} to {target}",
                    other.type_name()
                ))),
            }
        }
        ExprKind::Bin { lhs, op, rhs } => eval_bin(host, env, lhs, *op, rhs),
        ExprKind::Not(inner) => Ok(Value::Bool(!truth(eval_expr(host, env, inner)?, "not")?)),
        ExprKind::If { cond, then, els } => {
            if truth(eval_expr(host, env, cond)?, "if")? {
                eval_expr(host, env, then)
            } else {
                eval_expr(host, env, els)
            }
        }
        ExprKind::New(class) => host.create(class).map(Value::Obj),
    }
}

fn has_user_op(woven: &WovenModel, model: &ModelInstance, o: ObjId, op: &str) -> bool {
    woven.signature(model.class_of(o), op).is_some()
}

pub(crate) fn truth(v: Value, ctx: &str) -> Result<bool, Fault> {
    match v {
        Value::Bool(b) => Ok(b),
        other => Err(Fault::TypeFault(format!(
            "`{ctx}` expects Bool, got {}",
            other.type_name()
        ))),
    }
}

fn eval_bin<H: Host + ?Sized>(host: &mut H, env: &mut Env, lhs: &Expr, op: BinOp, rhs: &Expr) -> Result<Value, Fault> {
    match op {
        BinOp::And => {
            if !truth(eval_expr(host, env, lhs)?, "and")? {
                return Ok(Value::Bool(false));
            }
            return Ok(Value::Bool(truth(eval_expr(host, env, rhs)?, "and")?));
        }
        BinOp::Or => {
            if truth(eval_expr(host, env, lhs)?, "or")? {
                return Ok(Value::Bool(true));
            }
            return Ok(Value::Bool(truth(eval_expr(host, env, rhs)?, "or")?));
        }
        _ => {}
    }
    let a = eval_expr(host, env, lhs)?;
    let b = eval_expr(host, env, rhs)?;
    match (op, &a, &b) {
        (BinOp::Eq, _, _) => Ok(Value::Bool(a.equals(&b))),
        (BinOp::Ne, _, _) => Ok(Value::Bool(!a.equals(&b))),
        (BinOp::Add, Value::Str(x), Value::Str(y)) => Ok(Value::Str(format!("{x}{y}"))),
        (_, Value::Int(x), Value::Int(y)) => {
            let (x, y) = (*x, *y);
            let r = match op {
                BinOp::Add => x.checked_add(y).map(Value::Int),
                BinOp::Sub => x.checked_sub(y).map(Value::Int),
                BinOp::Mul => x.checked_mul(y).map(Value::Int),
                BinOp::Div => {
                    if y == 0 {
                        return Err(Fault::DivisionByZero);
                    }
                    x.checked_div(y).map(Value::Int)
                }
                BinOp::Lt => Some(Value::Bool(x < y)),
                BinOp::Le => Some(Value::Bool(x <= y)),
                BinOp::Gt => Some(Value::Bool(x > y)),
                BinOp::Ge => Some(Value::Bool(x >= y)),
                _ => unreachable!("handled above"),
            };
            r.ok_or(Fault::Overflow)
        }
        (BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge, Value::Str(x), Value::Str(y)) => Ok(Value::Bool(match op {
            BinOp::Lt => x < y,
            BinOp::Le => x <= y,
            BinOp::Gt => x > y,
            _ => x >= y,
        })),
        _ => Err(Fault::TypeFault(format!(
            "operator `{}` on {} and {}",
            op.symbol(),
            a.type_name(),
            b.type_name()
        ))),
    }
}

fn apply_lambda<H: Host + ?Sized>(host: &mut H, env: &mut Env, l: &Lambda, v: Value) -> Result<Value, Fault> {
    env.push();
    env.declare(l.param.clone(), v);
    let r = eval_expr(host, env, &l.body);
    env.pop();
    r
}

fn eval_coll<H: Host + ?Sized>(
    host: &mut H,
    env: &mut Env,
    receiver: &Expr,
    op: CollOp,
    args: &[Expr],
    lambda: Option<&Lambda>,
) -> Result<Value, Fault> {
    if op.mutates() {
        let arg = eval_expr(host, env, &args[0])?;
        return mutate(host, env, receiver, op, arg).map(|_| Value::Void);
    }
    let coll = match eval_expr(host, env, receiver)? {
        Value::Coll(c) => c,
        other => {
            return Err(Fault::TypeFault(format!(
                "collection operation `{}` on {}",
                op.name(),
                other.type_name()
            )))
        }
    };
    let lam = || lambda.ok_or_else(|| Fault::TypeFault(format!("`{}` needs a lambda", op.name())));
    match op {
        CollOp::Collect => {
            let l = lam()?;
            let mut out = Vec::with_capacity(coll.len());
            for v in coll.into_items() {
                out.push(apply_lambda(host, env, l, v)?);
            }
            Ok(Value::coll(CollKind::Sequence, out))
        }
        CollOp::Select | CollOp::Reject => {
            let l = lam()?;
            let keep_when = op == CollOp::Select;
            let kind = coll.kind;
            let mut out = Vec::new();
            for v in coll.into_items() {
                if truth(apply_lambda(host, env, l, v.clone())?, op.name())? == keep_when {
                    out.push(v);
                }
            }
            Ok(Value::coll(kind, out))
        }
        CollOp::ForAll | CollOp::Exists => {
            let l = lam()?;
            let want = op == CollOp::Exists;
            for v in coll.into_items() {
                if truth(apply_lambda(host, env, l, v)?, op.name())? == want {
                    return Ok(Value::Bool(want));
                }
            }
            Ok(Value::Bool(!want))
        }
        CollOp::Each => {
            let l = lam()?;
            for v in coll.into_items() {
                apply_lambda(host, env, l, v)?;
            }
            Ok(Value::Void)
        }
        CollOp::IsEmpty => Ok(Value::Bool(coll.is_empty())),
        CollOp::NotEmpty => Ok(Value::Bool(!coll.is_empty())),
        CollOp::Size => Ok(Value::Int(coll.len() as i64)),
        CollOp::First => Ok(coll.items().first().cloned().unwrap_or(Value::Void)),
        CollOp::Last => Ok(coll.items().last().cloned().unwrap_or(Value::Void)),
        CollOp::Includes => {
            let v = eval_expr(host, env, &args[0])?;
            Ok(Value::Bool(coll.contains(&v)))
        }
        CollOp::Intersection => {
            let other = match eval_expr(host, env, &args[0])? {
                Value::Coll(c) => c,
                v => return Err(Fault::TypeFault(format!("`intersection` with {}", v.type_name()))),
            };
            let kind = coll.kind;
            let items = coll.into_items().into_iter().filter(|v| other.contains(v));
            Ok(Value::Coll(Collection::new(kind, items)))
        }
        CollOp::Add | CollOp::Remove => unreachable!("handled above"),
    }
}

/// `add`/`remove` write through to their receiver: a local variable or a
/// model feature (the latter with full assignment semantics).
fn mutate<H: Host + ?Sized>(host: &mut H, env: &mut Env, receiver: &Expr, op: CollOp, arg: Value) -> Result<(), Fault> {
    match &receiver.kind {
        ExprKind::Var(name) => {
            let slot = env
                .lookup_mut(name)
                .ok_or_else(|| Fault::UnboundVariable(name.clone()))?;
            match slot {
                Value::Coll(c) => {
                    if op == CollOp::Add {
                        c.push(arg);
                    } else {
                        c.remove(&arg);
                    }
                    Ok(())
                }
                other => Err(Fault::TypeFault(format!("`{}` on {}", op.name(), other.type_name()))),
            }
        }
        ExprKind::Nav {
            receiver: owner,
            feature,
        } => match eval_expr(host, env, owner)? {
            Value::Obj(o) => {
                if op == CollOp::Add {
                    host.add(o, feature, arg)
                } else {
                    host.remove(o, feature, &arg)
                }
            }
            Value::Void => Err(Fault::VoidCall(op.name().to_string())),
            other => Err(Fault::TypeFault(format!(
                "navigation `.{feature}` on {}",
                other.type_name()
            ))),
        },
        _ => Err(Fault::TypeFault(format!(
            "`{}` needs a variable or feature receiver",
            op.name()
        ))),
    }
}
