//! Recursive-descent parser core shared by all unit grammars: token cursor,
//! types, multiplicities, features, expressions and statements.

use crate::behavior::{LoopCond, Stmt, StmtKind};
use crate::diag::{Code, Diagnostic, Pos};
use crate::expr::{BinOp, CollOp, Expr, ExprKind, Lambda, TypeTestKind};
use crate::meta::{Attribute, OperationSig, Param, Reference};
use crate::types::{Bounds, CollKind, PrimitiveType, TypeRef, Upper};

use super::lexer::{tokenize, Tok, Token};

pub type PResult<T> = Result<T, Diagnostic>;

/// Words that can never be used as variable names inside expressions.
const RESERVED: &[&str] = &[
    "true",
    "false",
    "void",
    "self",
    "not",
    "and",
    "or",
    "if",
    "then",
    "else",
    "end",
    "super",
    "var",
    "return",
    "from",
    "until",
    "loop",
    "while",
    "do",
    "is",
    "init",
    "inv",
    "pre",
    "post",
    "method",
    "operation",
    "rename",
    "aspect",
    "class",
    "attr",
    "ref",
    "op",
];

pub struct Parser {
    toks: Vec<Token>,
    idx: usize,
    unit: String,
}

impl Parser {
    pub fn new(unit: &str, text: &str) -> PResult<Self> {
        Ok(Parser {
            toks: tokenize(unit, text)?,
            idx: 0,
            unit: unit.to_string(),
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.idx].tok
    }

    pub fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.idx + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn pos(&self) -> Pos {
        self.toks[self.idx].pos
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.idx].tok.clone();
        if self.idx < self.toks.len() - 1 {
            self.idx += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    pub fn at_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }

    fn kw_at(&self, n: usize, k: &str) -> bool {
        matches!(self.peek_at(n), Tok::Ident(x) if x == k)
    }

    fn sym_at(&self, n: usize, s: &str) -> bool {
        matches!(self.peek_at(n), Tok::Sym(x) if *x == s)
    }

    pub fn eat_sym(&mut self, s: &str) -> bool {
        if self.at_sym(s) {
            self.advance();
            true
        } else {
            false
        }
    }

    pub fn eat_kw(&mut self, k: &str) -> bool {
        if self.at_kw(k) {
            self.advance();
            true
        } else {
            false
        }
    }

    pub fn error(&self, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::new(&self.unit, self.pos(), Code::SyntaxError, msg)
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        self.error(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    pub fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{s}`")))
        }
    }

    pub fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{k}`")))
        }
    }

    pub fn expect_ident(&mut self) -> PResult<String> {
        match self.peek() {
            Tok::Ident(s) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    pub fn expect_string(&mut self) -> PResult<String> {
        match self.peek() {
            Tok::Str(s) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => Err(self.unexpected("string literal")),
        }
    }

    fn expect_int(&mut self) -> PResult<i64> {
        match self.peek() {
            Tok::Int(i) => {
                let i = *i;
                self.advance();
                Ok(i)
            }
            _ => Err(self.unexpected("integer")),
        }
    }

    /// `package IDENT ;? (require STRING ;?)+` shared by constraint and
    /// behavior units.
    pub fn parse_unit_header(&mut self) -> PResult<(String, Vec<String>)> {
        self.expect_kw("package")?;
        let package = self.expect_ident()?;
        self.eat_sym(";");
        let mut requires = Vec::new();
        while self.eat_kw("require") {
            requires.push(self.expect_string()?);
            self.eat_sym(";");
        }
        if requires.is_empty() {
            return Err(self.unexpected("`require`"));
        }
        Ok((package, requires))
    }

    // ------------------------------------------------------------------
    // types and features

    pub fn parse_type(&mut self) -> PResult<TypeRef> {
        let name = self.expect_ident()?;
        if let Some(kind) = CollKind::from_name(&name) {
            self.expect_sym("<")?;
            let elem = self.parse_type()?;
            self.expect_sym(">")?;
            return Ok(TypeRef::coll(kind, elem));
        }
        if name == "Void" {
            return Ok(TypeRef::Void);
        }
        Ok(match PrimitiveType::from_name(&name) {
            Some(p) => TypeRef::Prim(p),
            None => TypeRef::Class(name),
        })
    }

    /// `[` INT `..` (`*` | INT) `]` or `[*]`. Absent means exactly one.
    pub fn parse_bounds(&mut self) -> PResult<Bounds> {
        if !self.eat_sym("[") {
            return Ok(Bounds::ONE);
        }
        if self.eat_sym("*") {
            self.expect_sym("]")?;
            return Ok(Bounds::MANY);
        }
        let pos = self.pos();
        let lower = self.expect_int()?;
        self.expect_sym("..")?;
        let upper = if self.eat_sym("*") {
            Upper::Many
        } else {
            let u = self.expect_int()?;
            Upper::Bounded(u32::try_from(u).map_err(|_| self.error("multiplicity out of range"))?)
        };
        self.expect_sym("]")?;
        let lower = u32::try_from(lower)
            .map_err(|_| Diagnostic::new(&self.unit, pos, Code::SyntaxError, "multiplicity out of range"))?;
        Ok(Bounds { lower, upper })
    }

    /// After `attr`: `IDENT : (Int|Bool|String) mult? ;`
    pub fn parse_attr(&mut self, pos: Pos) -> PResult<Attribute> {
        let name = self.expect_ident()?;
        self.expect_sym(":")?;
        let ty_pos = self.pos();
        let ty_name = self.expect_ident()?;
        let ty = PrimitiveType::from_name(&ty_name).ok_or_else(|| {
            Diagnostic::new(
                &self.unit,
                ty_pos,
                Code::SyntaxError,
                format!("attribute type must be Int, Bool or String, found `{ty_name}`"),
            )
        })?;
        let multiplicity = self.parse_bounds()?;
        self.expect_sym(";")?;
        Ok(Attribute {
            name,
            ty,
            multiplicity,
            pos,
        })
    }

    /// After `ref`: `IDENT : IDENT mult? containment? (opposite IDENT)? ;`
    pub fn parse_ref(&mut self, pos: Pos) -> PResult<Reference> {
        let name = self.expect_ident()?;
        self.expect_sym(":")?;
        let target = self.expect_ident()?;
        let multiplicity = self.parse_bounds()?;
        let is_containment = self.eat_kw("containment");
        let opposite = if self.eat_kw("opposite") {
            Some(self.expect_ident()?)
        } else {
            None
        };
        self.expect_sym(";")?;
        Ok(Reference {
            name,
            target,
            multiplicity,
            is_containment,
            opposite,
            pos,
        })
    }

    /// `IDENT ( params? ) (: type)?`
    pub fn parse_op_header(&mut self, pos: Pos) -> PResult<OperationSig> {
        let name = self.expect_ident()?;
        self.expect_sym("(")?;
        let mut params = Vec::new();
        if !self.at_sym(")") {
            loop {
                let pname = self.expect_ident()?;
                self.expect_sym(":")?;
                let ty = self.parse_type()?;
                params.push(Param { name: pname, ty });
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym(")")?;
        let return_type = if self.eat_sym(":") {
            self.parse_type()?
        } else {
            TypeRef::Void
        };
        Ok(OperationSig {
            name,
            params,
            return_type,
            pos,
        })
    }

    // ------------------------------------------------------------------
    // expressions

    pub fn parse_expr(&mut self) -> PResult<Expr> {
        self.parse_or()
    }

    fn parse_or(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_and()?;
        while self.at_kw("or") {
            let pos = self.pos();
            self.advance();
            let rhs = self.parse_and()?;
            lhs = bin(lhs, BinOp::Or, rhs, pos);
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_equality()?;
        while self.at_kw("and") {
            let pos = self.pos();
            self.advance();
            let rhs = self.parse_equality()?;
            lhs = bin(lhs, BinOp::And, rhs, pos);
        }
        Ok(lhs)
    }

    fn parse_equality(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_relational()?;
        loop {
            let op = if self.at_sym("==") {
                BinOp::Eq
            } else if self.at_sym("!=") {
                BinOp::Ne
            } else {
                return Ok(lhs);
            };
            let pos = self.pos();
            self.advance();
            let rhs = self.parse_relational()?;
            lhs = bin(lhs, op, rhs, pos);
        }
    }

    fn parse_relational(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_additive()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("<") => BinOp::Lt,
                Tok::Sym("<=") => BinOp::Le,
                Tok::Sym(">") => BinOp::Gt,
                Tok::Sym(">=") => BinOp::Ge,
                _ => return Ok(lhs),
            };
            let pos = self.pos();
            self.advance();
            let rhs = self.parse_additive()?;
            lhs = bin(lhs, op, rhs, pos);
        }
    }

    fn parse_additive(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_multiplicative()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("+") => BinOp::Add,
                Tok::Sym("-") => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let pos = self.pos();
            self.advance();
            let rhs = self.parse_multiplicative()?;
            lhs = bin(lhs, op, rhs, pos);
        }
    }

    fn parse_multiplicative(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("*") => BinOp::Mul,
                Tok::Sym("/") => BinOp::Div,
                _ => return Ok(lhs),
            };
            let pos = self.pos();
            self.advance();
            let rhs = self.parse_unary()?;
            lhs = bin(lhs, op, rhs, pos);
        }
    }

    fn parse_unary(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        if self.eat_kw("not") {
            let e = self.parse_unary()?;
            return Ok(Expr::new(ExprKind::Not(Box::new(e)), pos));
        }
        if self.eat_sym("-") {
            if let Tok::Int(i) = self.peek() {
                let i = *i;
                self.advance();
                return self.parse_postfix_from(Expr::new(ExprKind::Int(-i), pos), false);
            }
            let e = self.parse_unary()?;
            return Ok(bin(Expr::new(ExprKind::Int(0), pos), BinOp::Sub, e, pos));
        }
        self.parse_postfix(false)
    }

    /// A primary followed by any number of `.feature`, `.op(..)`, `.op{..}`
    /// suffixes. With `stop_at_each`, a trailing `.each {` is left unconsumed
    /// so that the statement parser can read a statement-block body.
    pub fn parse_postfix(&mut self, stop_at_each: bool) -> PResult<Expr> {
        let primary = self.parse_primary()?;
        self.parse_postfix_from(primary, stop_at_each)
    }

    fn parse_postfix_from(&mut self, mut e: Expr, stop_at_each: bool) -> PResult<Expr> {
        while self.at_sym(".") {
            if stop_at_each && self.kw_at(1, "each") && self.sym_at(2, "{") {
                break;
            }
            self.advance();
            let pos = self.pos();
            let name = self.expect_ident()?;

            if let Some(op) = CollOp::from_name(&name) {
                if op.takes_lambda() && self.at_sym("{") {
                    let lambda = self.parse_lambda()?;
                    e = Expr::new(
                        ExprKind::Coll {
                            receiver: Box::new(e),
                            op,
                            args: Vec::new(),
                            lambda: Some(Box::new(lambda)),
                        },
                        pos,
                    );
                    continue;
                }
                if !op.takes_lambda() && self.at_sym("(") {
                    let args = self.parse_args()?;
                    if args.len() != op.arity() {
                        return Err(Diagnostic::new(
                            &self.unit,
                            pos,
                            Code::SyntaxError,
                            format!("`{name}` takes {} argument(s), found {}", op.arity(), args.len()),
                        ));
                    }
                    e = Expr::new(
                        ExprKind::Coll {
                            receiver: Box::new(e),
                            op,
                            args,
                            lambda: None,
                        },
                        pos,
                    );
                    continue;
                }
                if op.takes_lambda() && self.at_sym("(") {
                    return Err(self.error(format!("`{name}` expects a lambda `{{ x | body }}`")));
                }
            }

            if (name == "oclIsKindOf" || name == "asType") && self.at_sym("(") {
                self.advance();
                let target = self.expect_ident()?;
                self.expect_sym(")")?;
                let kind = if name == "asType" {
                    TypeTestKind::AsType
                } else {
                    TypeTestKind::KindOf
                };
                e = Expr::new(
                    ExprKind::TypeTest {
                        receiver: Box::new(e),
                        kind,
                        target,
                    },
                    pos,
                );
                continue;
            }

            if name == "new" && self.at_sym("(") {
                let class = match &e.kind {
                    ExprKind::Var(c) => c.clone(),
                    _ => {
                        return Err(Diagnostic::new(
                            &self.unit,
                            pos,
                            Code::SyntaxError,
                            "`new` needs a class name receiver",
                        ))
                    }
                };
                self.advance();
                self.expect_sym(")")?;
                e = Expr::new(ExprKind::New(class), e.pos);
                continue;
            }

            let qualifier = if self.at_sym("[") {
                self.advance();
                let q = self.expect_ident()?;
                self.expect_sym("]")?;
                if !self.at_sym("(") {
                    return Err(self.unexpected("`(` after qualified operation"));
                }
                Some(q)
            } else {
                None
            };

            if self.at_sym("(") {
                let args = self.parse_args()?;
                e = Expr::new(
                    ExprKind::Call {
                        receiver: Box::new(e),
                        op: name,
                        args,
                        qualifier,
                    },
                    pos,
                );
            } else {
                e = Expr::new(
                    ExprKind::Nav {
                        receiver: Box::new(e),
                        feature: name,
                    },
                    pos,
                );
            }
        }
        Ok(e)
    }

    fn parse_lambda(&mut self) -> PResult<Lambda> {
        self.expect_sym("{")?;
        let param = self.expect_ident()?;
        self.expect_sym("|")?;
        let body = self.parse_expr()?;
        self.expect_sym("}")?;
        Ok(Lambda { param, body })
    }

    fn parse_args(&mut self) -> PResult<Vec<Expr>> {
        self.expect_sym("(")?;
        let mut args = Vec::new();
        if !self.at_sym(")") {
            loop {
                args.push(self.parse_expr()?);
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym(")")?;
        Ok(args)
    }

    fn parse_primary(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(i) => {
                self.advance();
                Ok(Expr::new(ExprKind::Int(i), pos))
            }
            Tok::Str(s) => {
                self.advance();
                Ok(Expr::new(ExprKind::Str(s), pos))
            }
            Tok::Sym("(") => {
                self.advance();
                let e = self.parse_expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Ident(w) => match w.as_str() {
                "true" | "false" => {
                    self.advance();
                    Ok(Expr::new(ExprKind::Bool(w == "true"), pos))
                }
                "void" => {
                    self.advance();
                    Ok(Expr::new(ExprKind::Void, pos))
                }
                "self" => {
                    self.advance();
                    Ok(Expr::new(ExprKind::SelfRef, pos))
                }
                "if" => {
                    self.advance();
                    let cond = self.parse_expr()?;
                    self.expect_kw("then")?;
                    let then = self.parse_expr()?;
                    self.expect_kw("else")?;
                    let els = self.parse_expr()?;
                    self.expect_kw("end")?;
                    Ok(Expr::new(
                        ExprKind::If {
                            cond: Box::new(cond),
                            then: Box::new(then),
                            els: Box::new(els),
                        },
                        pos,
                    ))
                }
                w if RESERVED.contains(&w) => Err(self.unexpected("expression")),
                _ => {
                    self.advance();
                    if self.at_sym("(") {
                        // implicit receiver: `op(args)` means `self.op(args)`
                        let args = self.parse_args()?;
                        Ok(Expr::new(
                            ExprKind::Call {
                                receiver: Box::new(Expr::new(ExprKind::SelfRef, pos)),
                                op: w,
                                args,
                                qualifier: None,
                            },
                            pos,
                        ))
                    } else {
                        Ok(Expr::new(ExprKind::Var(w), pos))
                    }
                }
            },
            _ => Err(self.unexpected("expression")),
        }
    }

    // ------------------------------------------------------------------
    // statements

    /// Statements up to (not including) one of the terminator keywords or `}`.
    pub fn parse_block(&mut self, terminators: &[&str]) -> PResult<Vec<Stmt>> {
        let mut out = Vec::new();
        loop {
            while self.eat_sym(";") {}
            if self.at_eof() || self.at_sym("}") || terminators.iter().any(|t| self.at_kw(t)) {
                return Ok(out);
            }
            out.push(self.parse_stmt()?);
        }
    }

    fn parse_stmt(&mut self) -> PResult<Stmt> {
        let pos = self.pos();
        let kind = if self.eat_kw("var") {
            let name = self.expect_ident()?;
            self.expect_sym(":")?;
            let ty = self.parse_type()?;
            let init = if self.eat_kw("init") || self.eat_sym(":=") {
                Some(self.parse_expr()?)
            } else {
                None
            };
            StmtKind::VarDecl { name, ty, init }
        } else if self.eat_kw("if") {
            let cond = self.parse_expr()?;
            self.expect_kw("then")?;
            let then = self.parse_block(&["else", "end"])?;
            let els = if self.eat_kw("else") {
                self.parse_block(&["end"])?
            } else {
                Vec::new()
            };
            self.expect_kw("end")?;
            StmtKind::If { cond, then, els }
        } else if self.eat_kw("from") {
            let init = self.parse_block(&["until"])?;
            self.expect_kw("until")?;
            let cond = self.parse_expr()?;
            self.expect_kw("loop")?;
            let body = self.parse_block(&["end"])?;
            self.expect_kw("end")?;
            StmtKind::Loop {
                init,
                cond: LoopCond::Until(cond),
                body,
            }
        } else if self.eat_kw("while") {
            let cond = self.parse_expr()?;
            self.expect_kw("loop")?;
            let body = self.parse_block(&["end"])?;
            self.expect_kw("end")?;
            StmtKind::Loop {
                init: Vec::new(),
                cond: LoopCond::While(cond),
                body,
            }
        } else if self.eat_kw("return") {
            let ends = self.at_eof()
                || self.at_sym("}")
                || self.at_sym(";")
                || ["end", "else", "until"].iter().any(|k| self.at_kw(k));
            StmtKind::Return(if ends { None } else { Some(self.parse_expr()?) })
        } else if self.eat_kw("super") {
            let qualifier = if self.eat_sym("[") {
                let q = self.expect_ident()?;
                self.expect_sym("]")?;
                Some(q)
            } else {
                None
            };
            let args = self.parse_args()?;
            StmtKind::SuperCall { qualifier, args }
        } else {
            let e = self.parse_postfix(true)?;
            if self.at_sym(".") {
                // `.each {` left for us by parse_postfix
                self.advance();
                self.advance();
                self.expect_sym("{")?;
                let param = self.expect_ident()?;
                self.expect_sym("|")?;
                let body = self.parse_block(&[])?;
                self.expect_sym("}")?;
                StmtKind::Each {
                    receiver: e,
                    param,
                    body,
                }
            } else if self.eat_sym(":=") {
                if !e.is_lvalue() {
                    return Err(Diagnostic::new(
                        &self.unit,
                        pos,
                        Code::SyntaxError,
                        "left side of `:=` is not assignable",
                    ));
                }
                let value = self.parse_expr()?;
                StmtKind::Assign { target: e, value }
            } else {
                StmtKind::Expr(e)
            }
        };
        self.eat_sym(";");
        Ok(Stmt::new(kind, pos))
    }
}

fn bin(lhs: Expr, op: BinOp, rhs: Expr, pos: Pos) -> Expr {
    Expr::new(
        ExprKind::Bin {
            lhs: Box::new(lhs),
            op,
            rhs: Box::new(rhs),
        },
        pos,
    )
}
