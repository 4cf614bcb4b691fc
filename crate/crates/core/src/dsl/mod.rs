//! Frontend for `.sbt` sources: tokenizer, parser, validator and canonical
//! pretty-printer.

use std::fmt;

pub mod ast;
mod lexer;
mod parser;
mod pretty;
mod validate;

pub use ast::Ast;
pub use lexer::{is_keyword, tokenize, LexError, Token, TokenKind};
pub use parser::{parse, MAX_LITERAL};
pub use pretty::{expr as pretty_expr, ltl as pretty_ltl, pretty_print};
pub use validate::validate;

use crate::model::SbtModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub line: usize,
    pub column: usize,
}

impl Diagnostic {
    pub fn error(message: impl Into<String>, line: usize, column: usize) -> Self {
        Diagnostic {
            severity: Severity::Error,
            message: message.into(),
            line,
            column,
        }
    }

    pub fn warning(message: impl Into<String>, line: usize, column: usize) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            message: message.into(),
            line,
            column,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}: {}",
            self.line, self.column, self.severity, self.message
        )
    }
}

impl From<LexError> for Diagnostic {
    fn from(e: LexError) -> Self {
        Diagnostic::error(format!("unexpected character `{}`", e.ch), e.line, e.column)
    }
}

/// A successfully validated model together with any warnings.
#[derive(Clone, Debug)]
pub struct Compiled {
    pub model: SbtModel,
    pub warnings: Vec<Diagnostic>,
}

/// Tokenize, parse and validate in one go.
pub fn compile(source: &str) -> Result<Compiled, Vec<Diagnostic>> {
    let tokens = tokenize(source).map_err(|e| vec![Diagnostic::from(e)])?;
    let ast = parse(&tokens)?;
    validate(&ast)
}

/// Parse only; useful for round-trip checks.
pub fn parse_source(source: &str) -> Result<Ast, Vec<Diagnostic>> {
    let tokens = tokenize(source).map_err(|e| vec![Diagnostic::from(e)])?;
    parse(&tokens)
}
