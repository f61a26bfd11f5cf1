//! A small arithmetic language for writing Lagrangians.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := atom ('^' factor)?
//! atom   := number | 'x' index | func '(' expr ')' | '(' expr ')' | '-' atom
//! func   := sin | cos | exp | sqrt | abs
//! ```
//!
//! Variables are `x0 .. x{4n-1}`. There is no implicit multiplication.

mod ast;
mod eval;
mod lexer;
mod parser;

use std::fmt;

use serde::Serialize;

pub use ast::{BinOp, Expr, ExprKind, Func};
pub use eval::{eval_as_field, DslField};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse, MAX_DEPTH};

/// Byte range `[start, end)` into the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseError {
    pub message: String,
    pub span: Span,
    pub expected: Vec<String>,
}

impl ParseError {
    pub(crate) fn new(message: impl Into<String>, span: Span) -> Self {
        ParseError {
            message: message.into(),
            span,
            expected: Vec::new(),
        }
    }

    pub(crate) fn expecting(mut self, expected: &[&str]) -> Self {
        self.expected = expected.iter().map(|s| s.to_string()).collect();
        self
    }

    /// The message followed by the source line with a caret marker under
    /// the offending span.
    pub fn render(&self, src: &str) -> String {
        render_span(src, self.span, &self.to_string())
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}..{}", self.message, self.span.start, self.span.end)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

/// Renders `message` above the source with `^` markers under `span`.
pub fn render_span(src: &str, span: Span, message: &str) -> String {
    let start = src[..span.start.min(src.len())].chars().count();
    let width = src
        .get(span.start..span.end.min(src.len()))
        .map(|s| s.chars().count())
        .unwrap_or(0)
        .max(1);
    format!(
        "{message}\n  {}\n  {}{}",
        src.replace(['\n', '\r', '\t'], " "),
        " ".repeat(start),
        "^".repeat(width)
    )
}
