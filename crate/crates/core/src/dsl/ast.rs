//! Syntax tree for lever scripts.
//!
//! Equality on [`Expr`], [`Stmt`] and [`Address`] is structural: source
//! spans are ignored, so a program compares equal to its reformatted reparse.

use std::fmt;

use serde::Serialize;

/// Half-open byte range plus the 1-based line/column of its start.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub column: u32,
}

impl SourceSpan {
    /// Smallest span covering both `self` and `other`, positioned at `self`.
    pub fn to(self, other: SourceSpan) -> SourceSpan {
        SourceSpan { end: other.end.max(self.end), ..self }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Namespace {
    /// Lever input parameters (read-only).
    In,
    /// The simulated year frame: `out.<region>.<attribute>`.
    Out,
}

impl Namespace {
    pub fn as_str(self) -> &'static str {
        match self {
            Namespace::In => "in",
            Namespace::Out => "out",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Address {
    pub namespace: Namespace,
    pub segments: Vec<String>,
    pub span: SourceSpan,
}

impl PartialEq for Address {
    fn eq(&self, other: &Self) -> bool {
        self.namespace == other.namespace && self.segments == other.segments
    }
}

impl Eq for Address {}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.namespace.as_str())?;
        for seg in &self.segments {
            write!(f, ".{seg}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Pow => "^",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::And => "and",
            BinaryOp::Or => "or",
        }
    }

    pub fn precedence(self) -> Precedence {
        match self {
            BinaryOp::Or => Precedence::Or,
            BinaryOp::And => Precedence::And,
            BinaryOp::Lt
            | BinaryOp::Le
            | BinaryOp::Gt
            | BinaryOp::Ge
            | BinaryOp::Eq
            | BinaryOp::Ne => Precedence::Comparison,
            BinaryOp::Add | BinaryOp::Sub => Precedence::Additive,
            BinaryOp::Mul | BinaryOp::Div => Precedence::Multiplicative,
            BinaryOp::Pow => Precedence::Power,
        }
    }

    pub fn is_right_assoc(self) -> bool {
        self == BinaryOp::Pow
    }
}

/// Binding strength, loosest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Precedence {
    Ternary,
    Or,
    And,
    Comparison,
    Additive,
    Multiplicative,
    Power,
    Unary,
    Primary,
}

impl Precedence {
    pub fn next(self) -> Precedence {
        match self {
            Precedence::Ternary => Precedence::Or,
            Precedence::Or => Precedence::And,
            Precedence::And => Precedence::Comparison,
            Precedence::Comparison => Precedence::Additive,
            Precedence::Additive => Precedence::Multiplicative,
            Precedence::Multiplicative => Precedence::Power,
            Precedence::Power => Precedence::Unary,
            Precedence::Unary | Precedence::Primary => Precedence::Primary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Abs,
    Min,
    Max,
    Floor,
    Ceil,
    Round,
}

impl Builtin {
    pub fn from_name(name: &str) -> Option<Builtin> {
        Some(match name {
            "abs" => Builtin::Abs,
            "min" => Builtin::Min,
            "max" => Builtin::Max,
            "floor" => Builtin::Floor,
            "ceil" => Builtin::Ceil,
            "round" => Builtin::Round,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Abs => "abs",
            Builtin::Min => "min",
            Builtin::Max => "max",
            Builtin::Floor => "floor",
            Builtin::Ceil => "ceil",
            Builtin::Round => "round",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Builtin::Min | Builtin::Max => 2,
            _ => 1,
        }
    }
}

/// A numeric literal as written. `30%` is stored as `literal = 30, percent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumberLit {
    pub literal: f64,
    pub percent: bool,
}

impl NumberLit {
    pub fn value(self) -> f64 {
        if self.percent {
            self.literal / 100.0
        } else {
            self.literal
        }
    }
}

#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: SourceSpan,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Number(NumberLit),
    Address(Address),
    Local(String),
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Ternary {
        cond: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
    Call {
        builtin: Builtin,
        args: Vec<Expr>,
    },
    Lifecycle(Vec<Address>),
}

impl Expr {
    pub fn precedence(&self) -> Precedence {
        match &self.kind {
            ExprKind::Binary { op, .. } => op.precedence(),
            ExprKind::Unary { .. } => Precedence::Unary,
            ExprKind::Ternary { .. } => Precedence::Ternary,
            _ => Precedence::Primary,
        }
    }

    /// Visits this expression and all sub-expressions, pre-order.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match &self.kind {
            ExprKind::Binary { lhs, rhs, .. } => {
                lhs.walk(f);
                rhs.walk(f);
            }
            ExprKind::Unary { operand, .. } => operand.walk(f),
            ExprKind::Ternary { cond, then, otherwise } => {
                cond.walk(f);
                then.walk(f);
                otherwise.walk(f);
            }
            ExprKind::Call { args, .. } => args.iter().for_each(|a| a.walk(f)),
            ExprKind::Number(_) | ExprKind::Address(_) | ExprKind::Local(_) | ExprKind::Lifecycle(_) => {}
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistributeMode {
    #[default]
    Proportional,
}

/// An ordered statement list plus any comments trailing its last statement.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Block {
    pub statements: Vec<Stmt>,
    pub trailing_comments: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: SourceSpan,
    /// `#` comments immediately preceding the statement, without the `#`.
    pub comments: Vec<String>,
}

impl PartialEq for Stmt {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.comments == other.comments
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    VarDecl {
        name: String,
        value: Expr,
    },
    Assign {
        target: Address,
        value: Expr,
    },
    Change {
        target: Address,
        amount: Expr,
        start_year: Expr,
        end_year: Expr,
    },
    Distribute {
        amount: Expr,
        targets: Vec<Address>,
        mode: DistributeMode,
    },
    Limit {
        target: Address,
        lower: Expr,
        upper: Expr,
    },
    If {
        cond: Expr,
        then_block: Block,
        else_block: Option<Block>,
    },
}

impl StmtKind {
    pub fn keyword(&self) -> &'static str {
        match self {
            StmtKind::VarDecl { .. } => "var",
            StmtKind::Assign { .. } => "assign",
            StmtKind::Change { .. } => "change",
            StmtKind::Distribute { .. } => "distribute",
            StmtKind::Limit { .. } => "limit",
            StmtKind::If { .. } => "if",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub body: Block,
    pub source_name: String,
}

impl Program {
    pub fn statements(&self) -> &[Stmt] {
        &self.body.statements
    }

    /// Every address mentioned anywhere in the program.
    pub fn addresses(&self) -> Vec<&Address> {
        fn expr_addrs<'a>(e: &'a Expr, out: &mut Vec<&'a Address>) {
            e.walk(&mut |node| match &node.kind {
                ExprKind::Address(a) => out.push(a),
                ExprKind::Lifecycle(list) => out.extend(list.iter()),
                _ => {}
            });
        }
        fn block_addrs<'a>(b: &'a Block, out: &mut Vec<&'a Address>) {
            for s in &b.statements {
                match &s.kind {
                    StmtKind::VarDecl { value, .. } => expr_addrs(value, out),
                    StmtKind::Assign { target, value } => {
                        out.push(target);
                        expr_addrs(value, out);
                    }
                    StmtKind::Change { target, amount, start_year, end_year } => {
                        out.push(target);
                        expr_addrs(amount, out);
                        expr_addrs(start_year, out);
                        expr_addrs(end_year, out);
                    }
                    StmtKind::Distribute { amount, targets, .. } => {
                        expr_addrs(amount, out);
                        out.extend(targets.iter());
                    }
                    StmtKind::Limit { target, lower, upper } => {
                        out.push(target);
                        expr_addrs(lower, out);
                        expr_addrs(upper, out);
                    }
                    StmtKind::If { cond, then_block, else_block } => {
                        expr_addrs(cond, out);
                        block_addrs(then_block, out);
                        if let Some(b) = else_block {
                            block_addrs(b, out);
                        }
                    }
                }
            }
        }
        let mut out = Vec::new();
        block_addrs(&self.body, &mut out);
        out
    }

    /// Names of the `in.*` parameters the program reads, sorted and deduplicated.
    pub fn input_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .addresses()
            .into_iter()
            .filter(|a| a.namespace == Namespace::In)
            .filter_map(|a| a.segments.first().cloned())
            .collect();
        names.sort();
        names.dedup();
        names
    }
}
