//! Method dispatch, statement execution and contract enforcement.

use std::fmt;

use crate::behavior::{LoopCond, MethodDef, Stmt, StmtKind};
use crate::composer::{ContractGroup, MethodEntry, WovenModel};
use crate::contracts::eval_clause;
use crate::expr::{eval_expr, Env, ExprKind, Host, Value};
use crate::types::TypeRef;

use super::{ContractKind, Fault, ModelInstance, ObjId};

/// Which contracts are checked around each invocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ContractPolicy {
    Off,
    #[default]
    PrePostOnly,
    /// Pre/postconditions plus the receiver's invariants after every call.
    Full,
}

impl ContractPolicy {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "off" => Some(ContractPolicy::Off),
            "prepost" => Some(ContractPolicy::PrePostOnly),
            "full" => Some(ContractPolicy::Full),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    OpEnter {
        obj: String,
        op: String,
    },
    OpExit {
        obj: String,
        op: String,
        result: String,
    },
    ContractViolation {
        kind: ContractKind,
        name: String,
        obj: String,
    },
    NodeExecuted(String),
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::OpEnter { obj, op } => write!(f, "OpEnter\t{obj}.{op}"),
            TraceEvent::OpExit { obj, op, result } => write!(f, "OpExit\t{obj}.{op} -> {result}"),
            TraceEvent::ContractViolation { kind, name, obj } => {
                write!(f, "ContractViolation\t{} {name} @ {obj}", kind.name())
            }
            TraceEvent::NodeExecuted(l) => write!(f, "NodeExecuted\t{l}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub events: Vec<TraceEvent>,
}

impl Trace {
    pub fn lines(&self) -> impl Iterator<Item = String> + '_ {
        self.events.iter().map(|e| e.to_string())
    }

    /// Labels of `NodeExecuted` events, in order.
    pub fn executed(&self) -> Vec<&str> {
        self.events
            .iter()
            .filter_map(|e| match e {
                TraceEvent::NodeExecuted(l) => Some(l.as_str()),
                _ => None,
            })
            .collect()
    }
}

pub const DEFAULT_MAX_DEPTH: usize = 400;

/// The method being executed, for resolving `super`.
struct Frame {
    definer: String,
    op: String,
}

enum Flow {
    Normal,
    Return(Value),
}

/// Runs woven methods against one model. `trace(s)` in method bodies records
/// `NodeExecuted(s)`; `fail(s)` raises a fault carrying `s`.
pub struct Interpreter<'a> {
    woven: &'a WovenModel,
    model: ModelInstance,
    pub policy: ContractPolicy,
    pub trace: Trace,
    /// Record `OpEnter`/`OpExit` events (node events are always kept).
    pub trace_calls: bool,
    pub max_depth: usize,
    frames: Vec<Frame>,
}

impl<'a> Interpreter<'a> {
    pub fn new(woven: &'a WovenModel, model: ModelInstance, policy: ContractPolicy) -> Self {
        Interpreter {
            woven,
            model,
            policy,
            trace: Trace::default(),
            trace_calls: true,
            max_depth: DEFAULT_MAX_DEPTH,
            frames: Vec::new(),
        }
    }

    pub fn model(&self) -> &ModelInstance {
        &self.model
    }

    pub fn into_parts(self) -> (ModelInstance, Trace) {
        (self.model, self.trace)
    }

    /// Dynamic dispatch of `op` on `obj` with contract checks.
    pub fn invoke(&mut self, obj: ObjId, op: &str, args: Vec<Value>) -> Result<Value, Fault> {
        let class = self.model.class_of(obj).to_string();
        let wc = self
            .woven
            .class(&class)
            .ok_or_else(|| Fault::UnknownClass(class.clone()))?;
        let Some(entry) = wc.dispatch(op).cloned() else {
            return self.builtin(obj, &class, op, args);
        };
        let label = self.model.label(obj).to_string();
        if self.trace_calls {
            self.trace.events.push(TraceEvent::OpEnter {
                obj: label.clone(),
                op: op.to_string(),
            });
        }
        let bindings: Vec<(String, Value)> = entry
            .method
            .sig
            .params
            .iter()
            .map(|p| p.name.clone())
            .zip(args.iter().cloned())
            .collect();
        if self.policy != ContractPolicy::Off {
            if let Some(groups) = wc.flat_pre.get(op) {
                self.check_pre(obj, &label, groups, &bindings)?;
            }
        }
        let result = self.run_entry(obj, op, &entry, args)?;
        if self.policy != ContractPolicy::Off {
            if let Some(groups) = wc.flat_post.get(op) {
                let mut b = bindings;
                b.push(("result".to_string(), result.clone()));
                self.check_post(obj, &label, groups, &b)?;
            }
        }
        if self.policy == ContractPolicy::Full {
            self.check_invariants(obj, &label)?;
        }
        if self.trace_calls {
            let rendered = result.render(&self.model);
            self.trace.events.push(TraceEvent::OpExit {
                obj: label,
                op: op.to_string(),
                result: rendered,
            });
        }
        Ok(result)
    }

    fn builtin(&mut self, obj: ObjId, class: &str, op: &str, args: Vec<Value>) -> Result<Value, Fault> {
        match (op, args.as_slice()) {
            ("trace", [Value::Str(s)]) => {
                self.trace.events.push(TraceEvent::NodeExecuted(s.clone()));
                Ok(Value::Void)
            }
            ("fail", [Value::Str(s)]) => Err(Fault::Raised(s.clone())),
            ("container", []) => Ok(self.model.container(obj).map_or(Value::Void, Value::Obj)),
            _ => Err(Fault::NoSuchMethod {
                class: class.to_string(),
                op: op.to_string(),
            }),
        }
    }

    fn violation(&mut self, kind: ContractKind, name: &str, label: &str) -> Fault {
        self.trace.events.push(TraceEvent::ContractViolation {
            kind,
            name: name.to_string(),
            obj: label.to_string(),
        });
        let (name, obj) = (name.to_string(), label.to_string());
        match kind {
            ContractKind::Pre => Fault::PreconditionViolation { name, obj },
            ContractKind::Post => Fault::PostconditionViolation { name, obj },
            ContractKind::Inv => Fault::InvariantViolation { name, obj },
        }
    }

    /// Levels combine by disjunction, clauses within a level by conjunction.
    /// On failure the first failing clause of the most specific level is
    /// reported.
    fn check_pre(
        &mut self,
        obj: ObjId,
        label: &str,
        groups: &[ContractGroup],
        b: &[(String, Value)],
    ) -> Result<(), Fault> {
        let mut first_failure: Option<String> = None;
        for g in groups {
            let mut failed = None;
            for c in &g.clauses {
                if !eval_clause(self.woven, &self.model, c, obj, b)? {
                    failed = Some(c.name.clone());
                    break;
                }
            }
            match failed {
                None => return Ok(()),
                Some(n) => {
                    first_failure.get_or_insert(n);
                }
            }
        }
        match first_failure {
            Some(n) => Err(self.violation(ContractKind::Pre, &n, label)),
            None => Ok(()),
        }
    }

    fn check_post(
        &mut self,
        obj: ObjId,
        label: &str,
        groups: &[ContractGroup],
        b: &[(String, Value)],
    ) -> Result<(), Fault> {
        for g in groups {
            for c in &g.clauses {
                if !eval_clause(self.woven, &self.model, c, obj, b)? {
                    return Err(self.violation(ContractKind::Post, &c.name, label));
                }
            }
        }
        Ok(())
    }

    fn check_invariants(&mut self, obj: ObjId, label: &str) -> Result<(), Fault> {
        let class = self.model.class_of(obj);
        let Some(wc) = self.woven.class(class) else {
            return Ok(());
        };
        for inv in &wc.flat_invariants {
            if !eval_clause(self.woven, &self.model, &inv.clause, obj, &[])? {
                return Err(self.violation(ContractKind::Inv, &inv.clause.name, label));
            }
        }
        Ok(())
    }

    fn run_entry(&mut self, obj: ObjId, op: &str, entry: &MethodEntry, args: Vec<Value>) -> Result<Value, Fault> {
        if self.frames.len() >= self.max_depth {
            return Err(Fault::CallDepthExceeded(self.max_depth));
        }
        let m: &MethodDef = &entry.method;
        if m.sig.params.len() != args.len() {
            return Err(Fault::TypeFault(format!(
                "`{op}` takes {} argument(s), got {}",
                m.sig.params.len(),
                args.len()
            )));
        }
        let mut env = Env::new(Value::Obj(obj));
        for (p, a) in m.sig.params.iter().zip(args) {
            env.declare(p.name.clone(), a);
        }
        self.frames.push(Frame {
            definer: entry.defining_class.clone(),
            op: op.to_string(),
        });
        let method = entry.method.clone();
        let flow = self.block(&mut env, &method.body);
        self.frames.pop();
        match flow? {
            Flow::Return(v) => Ok(coerce_to(v, &method.sig.return_type)),
            Flow::Normal if method.sig.return_type == TypeRef::Void => Ok(Value::Void),
            Flow::Normal => Err(Fault::MissingReturn(format!("{}.{op}", entry.defining_class))),
        }
    }

    fn block(&mut self, env: &mut Env, body: &[Stmt]) -> Result<Flow, Fault> {
        env.push();
        let r = self.stmts(env, body);
        env.pop();
        r
    }

    fn stmts(&mut self, env: &mut Env, body: &[Stmt]) -> Result<Flow, Fault> {
        for s in body {
            if let Flow::Return(v) = self.stmt(env, s)? {
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Normal)
    }

    fn cond(&mut self, env: &mut Env, e: &crate::expr::Expr) -> Result<bool, Fault> {
        crate::expr::truth(eval_expr(self, env, e)?, "condition")
    }

    fn stmt(&mut self, env: &mut Env, s: &Stmt) -> Result<Flow, Fault> {
        match &s.kind {
            StmtKind::VarDecl { name, ty, init } => {
                let v = match init {
                    Some(e) => coerce_to(eval_expr(self, env, e)?, ty),
                    None => default_for(ty),
                };
                env.declare(name.clone(), v);
            }
            StmtKind::Assign { target, value } => {
                let v = eval_expr(self, env, value)?;
                match &target.kind {
                    ExprKind::Var(n) => {
                        let slot = env.lookup_mut(n).ok_or_else(|| Fault::UnboundVariable(n.clone()))?;
                        *slot = match (&*slot, v) {
                            (Value::Coll(old), Value::Coll(new)) => Value::Coll(new.coerce(old.kind)),
                            (_, v) => v,
                        };
                    }
                    ExprKind::Nav { receiver, feature } => match eval_expr(self, env, receiver)? {
                        Value::Obj(o) => self.model.set_feature(self.woven, o, feature, v)?,
                        Value::Void => return Err(Fault::VoidCall(format!("{feature} :="))),
                        other => {
                            return Err(Fault::TypeFault(format!(
                                "assignment to `.{feature}` of {}",
                                other.type_name()
                            )))
                        }
                    },
                    _ => {
                        return Err(Fault::TypeFault(
                            "assignment target is not a variable or feature".into(),
                        ))
                    }
                }
            }
            StmtKind::Expr(e) => {
                eval_expr(self, env, e)?;
            }
            StmtKind::If { cond, then, els } => {
                let branch = if self.cond(env, cond)? { then } else { els };
                return self.block(env, branch);
            }
            StmtKind::Loop { init, cond, body } => {
                env.push();
                let r = self.run_loop(env, init, cond, body);
                env.pop();
                return r;
            }
            StmtKind::Each { receiver, param, body } => {
                let items = match eval_expr(self, env, receiver)? {
                    Value::Coll(c) => c.into_items(),
                    Value::Void => Vec::new(),
                    other => return Err(Fault::TypeFault(format!("`each` over {}", other.type_name()))),
                };
                for item in items {
                    env.push();
                    env.declare(param.clone(), item);
                    let r = self.stmts(env, body);
                    env.pop();
                    if let Flow::Return(v) = r? {
                        return Ok(Flow::Return(v));
                    }
                }
            }
            StmtKind::Return(e) => {
                let v = match e {
                    Some(e) => eval_expr(self, env, e)?,
                    None => Value::Void,
                };
                return Ok(Flow::Return(v));
            }
            StmtKind::SuperCall { qualifier, args } => {
                let mut argv = Vec::with_capacity(args.len());
                for a in args {
                    argv.push(eval_expr(self, env, a)?);
                }
                let Value::Obj(me) = env.self_val else {
                    return Err(Fault::TypeFault("`super` outside a method".into()));
                };
                self.call_super(me, qualifier.as_deref(), argv)?;
            }
        }
        Ok(Flow::Normal)
    }

    fn run_loop(&mut self, env: &mut Env, init: &[Stmt], cond: &LoopCond, body: &[Stmt]) -> Result<Flow, Fault> {
        if let Flow::Return(v) = self.stmts(env, init)? {
            return Ok(Flow::Return(v));
        }
        loop {
            let go = match cond {
                LoopCond::Until(c) => !self.cond(env, c)?,
                LoopCond::While(c) => self.cond(env, c)?,
            };
            if !go {
                return Ok(Flow::Normal);
            }
            if let Flow::Return(v) = self.block(env, body)? {
                return Ok(Flow::Return(v));
            }
        }
    }

    /// Runs the definition after the current one in the receiver's method
    /// table, or `Q`'s definition for `super[Q]`. Contracts are not
    /// re-checked.
    fn call_super(&mut self, obj: ObjId, qualifier: Option<&str>, args: Vec<Value>) -> Result<Value, Fault> {
        let (definer, op) = match self.frames.last() {
            Some(f) => (f.definer.clone(), f.op.clone()),
            None => return Err(Fault::TypeFault("`super` outside a method".into())),
        };
        let no_method = |class: &str| Fault::NoSuchMethod {
            class: class.to_string(),
            op: format!("super.{op}"),
        };
        let entry = match qualifier {
            Some(q) => self
                .woven
                .class(q)
                .and_then(|c| c.dispatch(&op))
                .cloned()
                .ok_or_else(|| no_method(q))?,
            None => {
                let class = self.model.class_of(obj).to_string();
                let table = self.woven.class(&class).and_then(|c| c.method_table.get(&op));
                let next = table.and_then(|t| {
                    let at = t.iter().position(|e| e.defining_class == definer)?;
                    t.get(at + 1)
                });
                next.cloned().ok_or_else(|| no_method(&definer))?
            }
        };
        self.run_entry(obj, &op, &entry, args)
    }

    /// Invokes `op` on every root whose class conforms to `class`, in root
    /// order. Faults if there is none.
    pub fn run_entry_point(&mut self, class: &str, op: &str) -> Result<(), Fault> {
        let targets: Vec<ObjId> = self
            .model
            .roots()
            .iter()
            .copied()
            .filter(|r| self.woven.conforms(self.model.class_of(*r), class))
            .collect();
        if targets.is_empty() {
            return Err(Fault::NoEntryObject(class.to_string()));
        }
        for t in targets {
            self.invoke(t, op, Vec::new())?;
        }
        Ok(())
    }
}

fn default_for(ty: &TypeRef) -> Value {
    match ty {
        TypeRef::Coll(k, _) => Value::Coll(crate::expr::Collection::empty(*k)),
        TypeRef::Prim(crate::types::PrimitiveType::Int) => Value::Int(0),
        TypeRef::Prim(crate::types::PrimitiveType::Bool) => Value::Bool(false),
        TypeRef::Prim(crate::types::PrimitiveType::String) => Value::Str(String::new()),
        _ => Value::Void,
    }
}

fn coerce_to(v: Value, ty: &TypeRef) -> Value {
    match (v, ty) {
        (Value::Coll(c), TypeRef::Coll(k, _)) => Value::Coll(c.coerce(*k)),
        (Value::Void, TypeRef::Coll(k, _)) => Value::Coll(crate::expr::Collection::empty(*k)),
        (v, _) => v,
    }
}

impl Host for Interpreter<'_> {
    fn woven(&self) -> &WovenModel {
        self.woven
    }

    fn model(&self) -> &ModelInstance {
        &self.model
    }

    fn call(&mut self, recv: ObjId, op: &str, qualifier: Option<&str>, args: Vec<Value>) -> Result<Value, Fault> {
        match qualifier {
            None => self.invoke(recv, op, args),
            Some(q) => {
                let entry = self
                    .woven
                    .class(q)
                    .and_then(|c| c.dispatch(op))
                    .cloned()
                    .ok_or_else(|| Fault::NoSuchMethod {
                        class: q.to_string(),
                        op: op.to_string(),
                    })?;
                self.run_entry(recv, op, &entry, args)
            }
        }
    }

    fn create(&mut self, class: &str) -> Result<ObjId, Fault> {
        self.model.create(self.woven, class)
    }

    fn add(&mut self, obj: ObjId, feature: &str, value: Value) -> Result<(), Fault> {
        self.model.add_to_feature(self.woven, obj, feature, value)
    }

    fn remove(&mut self, obj: ObjId, feature: &str, value: &Value) -> Result<(), Fault> {
        self.model.remove_from_feature(self.woven, obj, feature, value)
    }
}
