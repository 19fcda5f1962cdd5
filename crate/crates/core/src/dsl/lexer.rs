use std::fmt;

use thiserror::Error;

use super::ast::SourceSpan;

pub const KEYWORDS: &[&str] = &[
    "var",
    "change",
    "by",
    "over",
    "to",
    "distribute",
    "across",
    "proportionally",
    "limit",
    "if",
    "else",
    "in",
    "out",
    "and",
    "or",
    "not",
    "lifecycle",
    "abs",
    "min",
    "max",
    "floor",
    "ceil",
    "round",
];

const SYMBOLS2: &[&str] = &["<=", ">=", "==", "!="];
const SYMBOLS1: &str = "=+-*/^<>;,.()[]{}?:";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Number,
    PercentNumber,
    Ident,
    Keyword,
    Symbol,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Number => "NUMBER",
            TokenKind::PercentNumber => "PERCENT_NUMBER",
            TokenKind::Ident => "IDENT",
            TokenKind::Keyword => "KEYWORD",
            TokenKind::Symbol => "SYMBOL",
            TokenKind::Eof => "EOF",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Token<'src> {
    pub kind: TokenKind,
    pub text: &'src str,
    pub span: SourceSpan,
}

impl Token<'_> {
    /// Numeric value of a `Number` or `PercentNumber` token (percent already divided by 100).
    pub fn number_value(&self) -> Option<f64> {
        match self.kind {
            TokenKind::Number => self.text.parse().ok(),
            TokenKind::PercentNumber => self.text[..self.text.len() - 1]
                .parse::<f64>()
                .ok()
                .map(|v| v / 100.0),
            _ => None,
        }
    }

    pub fn is(&self, text: &str) -> bool {
        matches!(self.kind, TokenKind::Keyword | TokenKind::Symbol) && self.text == text
    }
}

/// A comment's span and its text without the leading `#`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comment<'src> {
    pub span: SourceSpan,
    pub text: &'src str,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: unexpected character `{found}`")]
pub struct LexError {
    pub span: SourceSpan,
    pub found: char,
}

struct Cursor<'src> {
    src: &'src str,
    pos: usize,
    line: u32,
    column: u32,
}

impl<'src> Cursor<'src> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, byte_offset: usize) -> Option<char> {
        self.src.get(self.pos + byte_offset..)?.chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn span_from(&self, start: (usize, u32, u32)) -> SourceSpan {
        SourceSpan { start: start.0, end: self.pos, line: start.1, column: start.2 }
    }

    fn mark(&self) -> (usize, u32, u32) {
        (self.pos, self.line, self.column)
    }
}

/// Tokenizes `source`, returning tokens (ending with `Eof`) and comments.
pub fn tokenize_with_comments(source: &str) -> Result<(Vec<Token<'_>>, Vec<Comment<'_>>), LexError> {
    let mut cur = Cursor { src: source, pos: 0, line: 1, column: 1 };
    let mut tokens = Vec::new();
    let mut comments = Vec::new();

    while let Some(c) = cur.peek() {
        let start = cur.mark();
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '#' {
            cur.bump();
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            let span = cur.span_from(start);
            comments.push(Comment { span, text: &source[span.start + 1..span.end] });
            continue;
        }

        let kind = if c.is_ascii_digit() {
            while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                cur.bump();
            }
            if cur.peek() == Some('.') && cur.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
                cur.bump();
                while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                    cur.bump();
                }
            }
            if cur.peek() == Some('%') {
                cur.bump();
                TokenKind::PercentNumber
            } else {
                TokenKind::Number
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            while cur.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                cur.bump();
            }
            if KEYWORDS.contains(&&source[start.0..cur.pos]) {
                TokenKind::Keyword
            } else {
                TokenKind::Ident
            }
        } else if SYMBOLS2.iter().any(|s| source[cur.pos..].starts_with(s)) {
            cur.bump();
            cur.bump();
            TokenKind::Symbol
        } else if SYMBOLS1.contains(c) {
            cur.bump();
            TokenKind::Symbol
        } else {
            cur.bump();
            return Err(LexError { span: cur.span_from(start), found: c });
        };

        let span = cur.span_from(start);
        tokens.push(Token { kind, text: &source[span.start..span.end], span });
    }

    let eof = cur.span_from(cur.mark());
    tokens.push(Token { kind: TokenKind::Eof, text: "", span: eof });
    Ok((tokens, comments))
}

pub fn tokenize(source: &str) -> Result<Vec<Token<'_>>, LexError> {
    tokenize_with_comments(source).map(|(tokens, _)| tokens)
}
