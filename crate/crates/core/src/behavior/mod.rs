//! The behavioral-semantics concern: an imperative action language whose
//! `aspect class` blocks reopen metamodel classes to add methods, features and
//! supertypes.

mod parse;
mod typeck;

pub use parse::parse_behavior;
pub use typeck::typecheck_behavior;

use std::sync::Arc;

use crate::diag::Pos;
use crate::expr::Expr;
use crate::meta::{Attribute, OperationSig, Reference};
use crate::types::TypeRef;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BehaviorModule {
    pub package: String,
    pub requires: Vec<String>,
    pub aspects: Vec<AspectClass>,
    pub source_unit: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Renaming {
    pub op: String,
    pub from: String,
    pub new_name: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AspectClass {
    pub class_name: String,
    pub added_supertypes: Vec<String>,
    pub added_attributes: Vec<Attribute>,
    pub added_references: Vec<Reference>,
    pub methods: Vec<Arc<MethodDef>>,
    pub renamings: Vec<Renaming>,
    pub pos: Pos,
}

impl AspectClass {
    pub fn new(class_name: impl Into<String>) -> Self {
        AspectClass {
            class_name: class_name.into(),
            added_supertypes: Vec::new(),
            added_attributes: Vec::new(),
            added_references: Vec::new(),
            methods: Vec::new(),
            renamings: Vec::new(),
            pos: Pos::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDef {
    pub sig: OperationSig,
    pub body: Vec<Stmt>,
    /// `method` (reopens an inherited signature) rather than `operation`.
    pub overrides: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoopCond {
    Until(Expr),
    While(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    VarDecl {
        name: String,
        ty: TypeRef,
        init: Option<Expr>,
    },
    Assign {
        target: Expr,
        value: Expr,
    },
    Expr(Expr),
    If {
        cond: Expr,
        then: Vec<Stmt>,
        els: Vec<Stmt>,
    },
    /// `from init until cond loop body end`, or `while cond loop body end`
    /// (the latter with an empty `init`).
    Loop {
        init: Vec<Stmt>,
        cond: LoopCond,
        body: Vec<Stmt>,
    },
    Each {
        receiver: Expr,
        param: String,
        body: Vec<Stmt>,
    },
    Return(Option<Expr>),
    SuperCall {
        qualifier: Option<String>,
        args: Vec<Expr>,
    },
}

impl Stmt {
    pub fn new(kind: StmtKind, pos: Pos) -> Self {
        Stmt { kind, pos }
    }
}
