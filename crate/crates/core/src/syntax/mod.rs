//! Lexing and recursive-descent parsing shared by every unit grammar.

pub(crate) mod lexer;
pub(crate) mod parser;

pub(crate) use parser::Parser;
