//! The lever scripting language: lexer, parser, static checker and
//! canonical formatter.
//!
//! ```text
//! program    = { statement } ;
//! statement  = varDecl | assign | change | distribute | limit | ifStmt ;
//! varDecl    = "var" IDENT "=" expr ";" ;
//! assign     = address "=" expr ";" ;
//! change     = "change" address "by" expr "over" expr "to" expr ";" ;
//! distribute = "distribute" expr "across" "[" address { "," address } "]"
//!              [ "proportionally" ] ";" ;
//! limit      = "limit" address "to" "[" expr "," expr "]" ";" ;
//! ifStmt     = "if" expr "{" { statement } "}" [ "else" "{" { statement } "}" ] ;
//! address    = ("in" | "out") "." IDENT { "." IDENT } ;
//! call       = ("abs"|"min"|"max"|"floor"|"ceil"|"round") "(" expr {"," expr} ")"
//!            | "lifecycle" "(" "[" address { "," address } "]" ")" ;
//! ```
//!
//! Numbers are decimal with an optional fraction; a trailing `%` divides by
//! 100. Comments run from `#` to end of line.

pub mod ast;
mod check;
mod format;
mod lexer;
mod parser;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

pub use self::ast::{Address, Block, Expr, ExprKind, Namespace, Program, SourceSpan, Stmt, StmtKind};
pub use self::check::{check, CheckedProgram, Violation, ViolationKind};
pub use self::format::{format_expr, format_program};
pub use self::lexer::{tokenize, tokenize_with_comments, Comment, LexError, Token, TokenKind, KEYWORDS};
pub use self::parser::{parse_expr, parse_program, parse_source, ParseError, SyntaxError};

use crate::projection::Vocabulary;

/// Any problem found while turning script text into a [`CheckedProgram`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    /// `LexError`, `ParseError`, or a [`ViolationKind`] name.
    pub kind: String,
    pub message: String,
    pub span: SourceSpan,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.span, self.kind, self.message)
    }
}

impl From<SyntaxError> for Diagnostic {
    fn from(e: SyntaxError) -> Self {
        let (kind, message) = match &e {
            SyntaxError::Lex(l) => ("LexError", format!("unexpected character `{}`", l.found)),
            SyntaxError::Parse(p) => (
                "ParseError",
                e.to_string().split_once(": ").map(|(_, m)| m.to_string()).unwrap_or_else(|| p.to_string()),
            ),
        };
        Diagnostic { kind: kind.to_string(), message, span: e.span() }
    }
}

impl From<Violation> for Diagnostic {
    fn from(v: Violation) -> Self {
        Diagnostic { kind: v.kind.to_string(), message: v.message, span: v.span }
    }
}

/// Lex, parse and check in one step. Syntax errors stop at the first one;
/// check violations are all reported.
pub fn compile(
    source: &str,
    source_name: &str,
    vocabulary: &Vocabulary,
    inputs: Option<&BTreeSet<String>>,
) -> Result<CheckedProgram, Vec<Diagnostic>> {
    let program = parse_source(source, source_name).map_err(|e| vec![Diagnostic::from(e)])?;
    check(program, vocabulary, inputs).map_err(|vs| vs.into_iter().map(Diagnostic::from).collect())
}
