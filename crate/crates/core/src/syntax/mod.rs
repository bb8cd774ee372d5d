//! Lexer, parser and AST for the input language.
//!
//! The accepted subset covers normal rules, integrity constraints, choice
//! heads with optional count bounds, `#external`, `#minimize` (and `:~` weak
//! constraints, which are normalized to `#minimize`), `#show`, `#const`,
//! `#program` and `#script` blocks (kept but never executed).

mod ast;
mod lexer;
mod parser;
mod safety;

pub use ast::*;
pub use parser::{parse_atom, parse_program, parse_statements, parse_term};
pub use safety::{check_safety, check_statement_safety, plan_body, BodyPlan, PlanStep, UnsafeVariable};

use thiserror::Error;

/// A positioned syntax error. Lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: syntax error: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl SyntaxError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        SyntaxError { line, column, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("{line}:{column}: duplicate parameter `{name}`")]
    DuplicateParam { name: String, line: usize, column: usize },
    #[error("term `{0}` is not ground")]
    NonGroundTerm(String),
}
