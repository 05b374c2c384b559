use std::sync::Arc;

use crate::diag::Pos;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }
}

/// Built-in collection operations. The first six take a lambda; the rest take
/// zero or one argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CollOp {
    Collect,
    Select,
    Reject,
    Each,
    ForAll,
    Exists,
    IsEmpty,
    NotEmpty,
    Size,
    First,
    Last,
    Add,
    Remove,
    Includes,
    Intersection,
}

impl CollOp {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "collect" => CollOp::Collect,
            "select" => CollOp::Select,
            "reject" => CollOp::Reject,
            "each" => CollOp::Each,
            "forAll" => CollOp::ForAll,
            "exists" => CollOp::Exists,
            "isEmpty" => CollOp::IsEmpty,
            "notEmpty" => CollOp::NotEmpty,
            "size" => CollOp::Size,
            "first" => CollOp::First,
            "last" => CollOp::Last,
            "add" => CollOp::Add,
            "remove" => CollOp::Remove,
            "includes" => CollOp::Includes,
            "intersection" => CollOp::Intersection,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            CollOp::Collect => "collect",
            CollOp::Select => "select",
            CollOp::Reject => "reject",
            CollOp::Each => "each",
            CollOp::ForAll => "forAll",
            CollOp::Exists => "exists",
            CollOp::IsEmpty => "isEmpty",
            CollOp::NotEmpty => "notEmpty",
            CollOp::Size => "size",
            CollOp::First => "first",
            CollOp::Last => "last",
            CollOp::Add => "add",
            CollOp::Remove => "remove",
            CollOp::Includes => "includes",
            CollOp::Intersection => "intersection",
        }
    }

    pub fn takes_lambda(self) -> bool {
        matches!(
            self,
            CollOp::Collect | CollOp::Select | CollOp::Reject | CollOp::Each | CollOp::ForAll | CollOp::Exists
        )
    }

    pub fn arity(self) -> usize {
        match self {
            CollOp::Add | CollOp::Remove | CollOp::Includes | CollOp::Intersection => 1,
            _ => 0,
        }
    }

    pub fn mutates(self) -> bool {
        matches!(self, CollOp::Add | CollOp::Remove)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TypeTestKind {
    KindOf,
    AsType,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lambda {
    pub param: String,
    pub body: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    SelfRef,
    Var(String),
    Int(i64),
    Bool(bool),
    Str(String),
    Void,
    Nav {
        receiver: Box<Expr>,
        feature: String,
    },
    /// `recv.op(args)`; with a qualifier, `recv.op[Q](args)` runs Q's
    /// definition of `op` instead of the dynamically dispatched one.
    Call {
        receiver: Box<Expr>,
        op: String,
        args: Vec<Expr>,
        qualifier: Option<String>,
    },
    Coll {
        receiver: Box<Expr>,
        op: CollOp,
        args: Vec<Expr>,
        lambda: Option<Box<Lambda>>,
    },
    TypeTest {
        receiver: Box<Expr>,
        kind: TypeTestKind,
        target: String,
    },
    Bin {
        lhs: Box<Expr>,
        op: BinOp,
        rhs: Box<Expr>,
    },
    Not(Box<Expr>),
    If {
        cond: Box<Expr>,
        then: Box<Expr>,
        els: Box<Expr>,
    },
    New(String),
}

impl Expr {
    pub fn new(kind: ExprKind, pos: Pos) -> Self {
        Expr { kind, pos }
    }

    pub fn is_lvalue(&self) -> bool {
        matches!(self.kind, ExprKind::Var(_) | ExprKind::Nav { .. })
    }

    /// True if evaluating this expression can change the model or allocate.
    pub fn has_side_effects(&self) -> bool {
        let mut found = false;
        self.walk(&mut |e| match &e.kind {
            ExprKind::New(_) => found = true,
            ExprKind::Coll { op, .. } if op.mutates() => found = true,
            _ => {}
        });
        found
    }

    /// Pre-order traversal over this expression and all sub-expressions.
    pub fn walk(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match &self.kind {
            ExprKind::Nav { receiver, .. } | ExprKind::TypeTest { receiver, .. } => receiver.walk(f),
            ExprKind::Call { receiver, args, .. } => {
                receiver.walk(f);
                args.iter().for_each(|a| a.walk(f));
            }
            ExprKind::Coll {
                receiver, args, lambda, ..
            } => {
                receiver.walk(f);
                args.iter().for_each(|a| a.walk(f));
                if let Some(l) = lambda {
                    l.body.walk(f);
                }
            }
            ExprKind::Bin { lhs, rhs, .. } => {
                lhs.walk(f);
                rhs.walk(f);
            }
            ExprKind::Not(e) => e.walk(f),
            ExprKind::If { cond, then, els } => {
                cond.walk(f);
                then.walk(f);
                els.walk(f);
            }
            _ => {}
        }
    }
}

/// Shared, immutable expression handle used inside woven tables.
pub type ExprRef = Arc<Expr>;
