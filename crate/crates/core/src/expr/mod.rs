//! The side-effect-aware expression language shared by constraints and
//! method bodies: parsing entry point, values, evaluation and typing.

mod ast;
mod eval;
mod typeck;
mod value;

pub use ast::{BinOp, CollOp, Expr, ExprKind, ExprRef, Lambda, TypeTestKind};
pub(crate) use eval::truth;
pub use eval::{eval_expr, Env, Host, PureHost};
pub(crate) use typeck::check_args as check_call_args;
pub use typeck::{builtin_signature, typecheck_expr, TypeContext};
pub use value::{Collection, Value};

use crate::diag::Diagnostic;
use crate::syntax::Parser;

/// Parses a standalone expression.
pub fn parse_expr(unit: &str, text: &str) -> Result<Expr, Diagnostic> {
    let mut p = Parser::new(unit, text)?;
    let e = p.parse_expr()?;
    if !p.at_eof() {
        return Err(p.error("trailing input after expression"));
    }
    Ok(e)
}
