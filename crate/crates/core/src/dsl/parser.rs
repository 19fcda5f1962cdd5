//! Hand-written recursive descent parser.
//!
//! Expression precedence, loosest to tightest: ternary `?:` (right
//! associative), `or`, `and`, comparisons, `+ -`, `* /`, `^` (right
//! associative), unary `- not`, primary. Parsing stops at the first error.

use thiserror::Error;

use super::ast::*;
use super::lexer::{tokenize_with_comments, Comment, LexError, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: expected {}, found {found}", expected_list(.expected))]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: Vec<String>,
    pub found: String,
}

fn expected_list(expected: &[String]) -> String {
    match expected {
        [] => "nothing".into(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} or {last}", init.join(", ")),
    }
}

/// Either failure from turning source text into a [`Program`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl SyntaxError {
    pub fn span(&self) -> SourceSpan {
        match self {
            SyntaxError::Lex(e) => e.span,
            SyntaxError::Parse(e) => e.span,
        }
    }
}

const STATEMENT_STARTS: &[&str] = &["var", "change", "distribute", "limit", "if", "in", "out"];

struct Parser<'t, 'src> {
    tokens: &'t [Token<'src>],
    comments: &'t [Comment<'src>],
    pos: usize,
    next_comment: usize,
}

type PResult<T> = Result<T, ParseError>;

fn describe(tok: &Token<'_>) -> String {
    match tok.kind {
        TokenKind::Eof => "end of input".into(),
        _ => format!("`{}`", tok.text),
    }
}

impl<'t, 'src> Parser<'t, 'src> {
    fn peek(&self) -> &Token<'src> {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token<'src> {
        let tok = self.tokens[self.pos];
        if tok.kind != TokenKind::Eof {
            self.pos += 1;
        }
        tok
    }

    fn last_span(&self) -> SourceSpan {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        let tok = self.peek();
        Err(ParseError {
            span: tok.span,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: describe(tok),
        })
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.peek().is(text) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, text: &str) -> PResult<Token<'src>> {
        if self.peek().is(text) {
            Ok(self.bump())
        } else {
            self.error(&[&format!("`{text}`")])
        }
    }

    fn ident(&mut self) -> PResult<Token<'src>> {
        if self.peek().kind == TokenKind::Ident {
            Ok(self.bump())
        } else {
            self.error(&["identifier"])
        }
    }

    fn take_comments_before(&mut self, offset: usize) -> Vec<String> {
        let mut out = Vec::new();
        while let Some(c) = self.comments.get(self.next_comment) {
            if c.span.start >= offset {
                break;
            }
            out.push(c.text.trim_end().to_string());
            self.next_comment += 1;
        }
        out
    }

    fn block_until(&mut self, close: Option<&str>) -> PResult<Block> {
        let mut statements = Vec::new();
        loop {
            let tok = *self.peek();
            let at_end = match close {
                Some(c) => tok.is(c),
                None => tok.kind == TokenKind::Eof,
            };
            if at_end {
                let trailing_comments = self.take_comments_before(tok.span.start);
                return Ok(Block { statements, trailing_comments });
            }
            if tok.kind == TokenKind::Eof {
                return self.error(&[&format!("`{}`", close.unwrap_or("}"))]);
            }
            statements.push(self.statement()?);
        }
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let first = *self.peek();
        let comments = self.take_comments_before(first.span.start);
        let kind = match first.text {
            "var" if first.kind == TokenKind::Keyword => {
                self.bump();
                let name = self.ident()?.text.to_string();
                self.expect("=")?;
                let value = self.expr()?;
                self.expect(";")?;
                StmtKind::VarDecl { name, value }
            }
            "in" | "out" if first.kind == TokenKind::Keyword => {
                let target = self.address()?;
                self.expect("=")?;
                let value = self.expr()?;
                self.expect(";")?;
                StmtKind::Assign { target, value }
            }
            "change" if first.kind == TokenKind::Keyword => {
                self.bump();
                let target = self.address()?;
                self.expect("by")?;
                let amount = self.expr()?;
                self.expect("over")?;
                let start_year = self.expr()?;
                self.expect("to")?;
                let end_year = self.expr()?;
                self.expect(";")?;
                StmtKind::Change { target, amount, start_year, end_year }
            }
            "distribute" if first.kind == TokenKind::Keyword => {
                self.bump();
                let amount = self.expr()?;
                self.expect("across")?;
                let targets = self.address_list()?;
                self.eat("proportionally");
                self.expect(";")?;
                StmtKind::Distribute { amount, targets, mode: DistributeMode::Proportional }
            }
            "limit" if first.kind == TokenKind::Keyword => {
                self.bump();
                let target = self.address()?;
                self.expect("to")?;
                self.expect("[")?;
                let lower = self.expr()?;
                self.expect(",")?;
                let upper = self.expr()?;
                self.expect("]")?;
                self.expect(";")?;
                StmtKind::Limit { target, lower, upper }
            }
            "if" if first.kind == TokenKind::Keyword => {
                self.bump();
                let cond = self.expr()?;
                self.expect("{")?;
                let then_block = self.block_until(Some("}"))?;
                self.expect("}")?;
                let else_block = if self.eat("else") {
                    self.expect("{")?;
                    let b = self.block_until(Some("}"))?;
                    self.expect("}")?;
                    Some(b)
                } else {
                    None
                };
                StmtKind::If { cond, then_block, else_block }
            }
            _ => {
                let expected: Vec<String> = STATEMENT_STARTS.iter().map(|s| format!("`{s}`")).collect();
                let refs: Vec<&str> = expected.iter().map(String::as_str).collect();
                return self.error(&refs);
            }
        };
        Ok(Stmt { kind, span: first.span.to(self.last_span()), comments })
    }

    fn address(&mut self) -> PResult<Address> {
        let tok = *self.peek();
        let namespace = match tok.text {
            "in" if tok.kind == TokenKind::Keyword => Namespace::In,
            "out" if tok.kind == TokenKind::Keyword => Namespace::Out,
            _ => return self.error(&["address"]),
        };
        self.bump();
        self.expect(".")?;
        let mut segments = vec![self.ident()?.text.to_string()];
        while self.eat(".") {
            segments.push(self.ident()?.text.to_string());
        }
        Ok(Address { namespace, segments, span: tok.span.to(self.last_span()) })
    }

    fn address_list(&mut self) -> PResult<Vec<Address>> {
        self.expect("[")?;
        let mut list = vec![self.address()?];
        while self.eat(",") {
            list.push(self.address()?);
        }
        self.expect("]")?;
        Ok(list)
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        let cond = self.binary(Precedence::Or)?;
        if self.eat("?") {
            let then = self.expr()?;
            self.expect(":")?;
            let otherwise = self.expr()?;
            let span = cond.span.to(otherwise.span);
            return Ok(Expr {
                kind: ExprKind::Ternary {
                    cond: Box::new(cond),
                    then: Box::new(then),
                    otherwise: Box::new(otherwise),
                },
                span,
            });
        }
        Ok(cond)
    }

    fn binary_op(&self, level: Precedence) -> Option<BinaryOp> {
        let tok = self.peek();
        if !matches!(tok.kind, TokenKind::Symbol | TokenKind::Keyword) {
            return None;
        }
        let op = match tok.text {
            "or" => BinaryOp::Or,
            "and" => BinaryOp::And,
            "<" => BinaryOp::Lt,
            "<=" => BinaryOp::Le,
            ">" => BinaryOp::Gt,
            ">=" => BinaryOp::Ge,
            "==" => BinaryOp::Eq,
            "!=" => BinaryOp::Ne,
            "+" => BinaryOp::Add,
            "-" => BinaryOp::Sub,
            "*" => BinaryOp::Mul,
            "/" => BinaryOp::Div,
            "^" => BinaryOp::Pow,
            _ => return None,
        };
        (op.precedence() == level).then_some(op)
    }

    fn binary(&mut self, level: Precedence) -> PResult<Expr> {
        if level == Precedence::Unary {
            return self.unary();
        }
        let mut lhs = self.binary(level.next())?;
        while let Some(op) = self.binary_op(level) {
            self.bump();
            let rhs = if op.is_right_assoc() { self.binary(level)? } else { self.binary(level.next())? };
            let span = lhs.span.to(rhs.span);
            lhs = Expr { kind: ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span };
            if op.is_right_assoc() {
                break;
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let tok = *self.peek();
        let op = if tok.is("-") {
            UnaryOp::Neg
        } else if tok.is("not") {
            UnaryOp::Not
        } else {
            return self.primary();
        };
        self.bump();
        let operand = self.unary()?;
        let span = tok.span.to(operand.span);
        Ok(Expr { kind: ExprKind::Unary { op, operand: Box::new(operand) }, span })
    }

    fn primary(&mut self) -> PResult<Expr> {
        let tok = *self.peek();
        match tok.kind {
            TokenKind::Number | TokenKind::PercentNumber => {
                self.bump();
                let percent = tok.kind == TokenKind::PercentNumber;
                let digits = if percent { &tok.text[..tok.text.len() - 1] } else { tok.text };
                let literal: f64 = digits.parse().unwrap_or(f64::INFINITY);
                if !literal.is_finite() {
                    return Err(ParseError {
                        span: tok.span,
                        expected: vec!["finite number".into()],
                        found: describe(&tok),
                    });
                }
                Ok(Expr { kind: ExprKind::Number(NumberLit { literal, percent }), span: tok.span })
            }
            TokenKind::Ident => {
                self.bump();
                Ok(Expr { kind: ExprKind::Local(tok.text.to_string()), span: tok.span })
            }
            TokenKind::Keyword => match tok.text {
                "in" | "out" => {
                    let a = self.address()?;
                    let span = a.span;
                    Ok(Expr { kind: ExprKind::Address(a), span })
                }
                "lifecycle" => {
                    self.bump();
                    self.expect("(")?;
                    let list = self.address_list()?;
                    self.expect(")")?;
                    Ok(Expr { kind: ExprKind::Lifecycle(list), span: tok.span.to(self.last_span()) })
                }
                name => match Builtin::from_name(name) {
                    Some(builtin) => {
                        self.bump();
                        self.expect("(")?;
                        let mut args = vec![self.expr()?];
                        while self.eat(",") {
                            args.push(self.expr()?);
                        }
                        let close = *self.peek();
                        self.expect(")")?;
                        if args.len() != builtin.arity() {
                            return Err(ParseError {
                                span: tok.span.to(close.span),
                                expected: vec![format!(
                                    "{} argument{} to `{}`",
                                    builtin.arity(),
                                    if builtin.arity() == 1 { "" } else { "s" },
                                    builtin.name()
                                )],
                                found: format!("{}", args.len()),
                            });
                        }
                        Ok(Expr { kind: ExprKind::Call { builtin, args }, span: tok.span.to(close.span) })
                    }
                    None => self.error(&["expression"]),
                },
            },
            TokenKind::Symbol if tok.text == "(" => {
                self.bump();
                let inner = self.expr()?;
                let close = self.expect(")")?;
                // Parentheses are not kept in the tree; widen the span to cover them.
                Ok(Expr { kind: inner.kind, span: tok.span.to(close.span) })
            }
            _ => self.error(&["expression"]),
        }
    }
}

/// Parses a token stream (as produced by `tokenize`) into a program.
pub fn parse_program(tokens: &[Token<'_>], source_name: &str) -> Result<Program, ParseError> {
    parse_with_comments(tokens, &[], source_name)
}

fn parse_with_comments(
    tokens: &[Token<'_>],
    comments: &[Comment<'_>],
    source_name: &str,
) -> Result<Program, ParseError> {
    let eof = [Token { kind: TokenKind::Eof, text: "", span: SourceSpan::default() }];
    let tokens = if tokens.last().is_some_and(|t| t.kind == TokenKind::Eof) { tokens } else { &eof[..] };
    let mut p = Parser { tokens, comments, pos: 0, next_comment: 0 };
    let body = p.block_until(None)?;
    Ok(Program { body, source_name: source_name.to_string() })
}

/// Tokenizes and parses `source`, keeping comments attached to statements.
pub fn parse_source(source: &str, source_name: &str) -> Result<Program, SyntaxError> {
    let (tokens, comments) = tokenize_with_comments(source)?;
    Ok(parse_with_comments(&tokens, &comments, source_name)?)
}

/// Parses a single expression; the whole input must be consumed.
pub fn parse_expr(source: &str) -> Result<Expr, SyntaxError> {
    let (tokens, comments) = tokenize_with_comments(source)?;
    let mut p = Parser { tokens: &tokens, comments: &comments, pos: 0, next_comment: 0 };
    let e = p.expr()?;
    if p.peek().kind != TokenKind::Eof {
        return Err(p.error::<()>(&["end of input"]).unwrap_err().into());
    }
    Ok(e)
}
