//! Interpreter for checked lever scripts against one simulated year.
//!
//! All values are `f64`. Comparisons and logical operators yield `1.0` or
//! `0.0`; any nonzero value is true. `and`, `or` and `?:` evaluate lazily.
//! Frame writes that would go negative are clamped to zero and recorded in
//! [`ExecDiagnostics`] instead of failing the run.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::dsl::ast::{BinaryOp, Builtin, UnaryOp};
use crate::dsl::{Address, Block, CheckedProgram, Expr, ExprKind, Namespace, SourceSpan, Stmt, StmtKind};
use crate::projection::{ProjectionSeries, Vocabulary, Year, GLOBAL_REGION};

/// Mutable `(region, attribute)` values for the year being simulated.
#[derive(Debug, Clone, PartialEq)]
pub struct YearFrame {
    vocabulary: Arc<Vocabulary>,
    values: Vec<f64>,
}

impl YearFrame {
    pub fn zeroed(vocabulary: Arc<Vocabulary>) -> Self {
        let n = vocabulary.regions().len() * vocabulary.attributes().len();
        YearFrame { vocabulary, values: vec![0.0; n] }
    }

    /// Copies one year out of a series.
    pub fn from_series(series: &ProjectionSeries, year: Year) -> Self {
        let vocabulary = series.vocabulary().clone();
        let mut values = Vec::with_capacity(vocabulary.regions().len() * vocabulary.attributes().len());
        for r in 0..vocabulary.regions().len() {
            values.extend_from_slice(series.row(r, year));
        }
        YearFrame { vocabulary, values }
    }

    pub fn vocabulary(&self) -> &Arc<Vocabulary> {
        &self.vocabulary
    }

    #[inline]
    fn idx(&self, region: usize, attribute: usize) -> usize {
        region * self.vocabulary.attributes().len() + attribute
    }

    pub fn at(&self, region: usize, attribute: usize) -> f64 {
        self.values[self.idx(region, attribute)]
    }

    pub fn set_at(&mut self, region: usize, attribute: usize, value: f64) {
        let i = self.idx(region, attribute);
        self.values[i] = value;
    }

    pub fn get(&self, region: &str, attribute: &str) -> Option<f64> {
        let a = self.vocabulary.attribute_index(attribute)?;
        if region == GLOBAL_REGION {
            return Some(self.global(a));
        }
        Some(self.at(self.vocabulary.region_index(region)?, a))
    }

    /// Sets a stored cell; returns `false` if the address does not resolve.
    pub fn set(&mut self, region: &str, attribute: &str, value: f64) -> bool {
        match (self.vocabulary.region_index(region), self.vocabulary.attribute_index(attribute)) {
            (Some(r), Some(a)) => {
                self.set_at(r, a, value);
                true
            }
            _ => false,
        }
    }

    pub fn global(&self, attribute: usize) -> f64 {
        (0..self.vocabulary.regions().len()).map(|r| self.at(r, attribute)).sum()
    }

    pub fn region_row(&self, region: usize) -> &[f64] {
        let n = self.vocabulary.attributes().len();
        &self.values[region * n..(region + 1) * n]
    }

    pub fn region_row_mut(&mut self, region: usize) -> &mut [f64] {
        let n = self.vocabulary.attributes().len();
        &mut self.values[region * n..(region + 1) * n]
    }
}

/// Interpreter store for one program run: `in.*`, `out.*` and locals.
#[derive(Debug, Clone, PartialEq)]
pub struct RuntimeState {
    pub inputs: BTreeMap<String, f64>,
    pub frame: YearFrame,
    pub current_year: Year,
    locals: HashMap<String, f64>,
}

impl RuntimeState {
    pub fn new(frame: YearFrame, current_year: Year) -> Self {
        RuntimeState { inputs: BTreeMap::new(), frame, current_year, locals: HashMap::new() }
    }

    pub fn with_input(mut self, name: &str, value: f64) -> Self {
        self.inputs.insert(name.to_string(), value);
        self
    }

    pub fn local(&self, name: &str) -> Option<f64> {
        self.locals.get(name).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClampRecord {
    pub address: String,
    pub span: SourceSpan,
    pub before: f64,
    pub after: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ExecDiagnostics {
    pub clamps_applied: Vec<ClampRecord>,
    /// Zero-denominator fallbacks taken (equal-split distribute, unweighted lifecycle mean).
    pub divisions_guarded: usize,
}

impl ExecDiagnostics {
    pub fn is_empty(&self) -> bool {
        self.clamps_applied.is_empty() && self.divisions_guarded == 0
    }

    pub fn extend(&mut self, other: ExecDiagnostics) {
        self.clamps_applied.extend(other.clamps_applied);
        self.divisions_guarded += other.divisions_guarded;
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuntimeErrorKind {
    #[error("division by zero")]
    DivisionByZero,
    #[error("result is not finite")]
    NonFiniteResult,
    #[error("math domain error ({0})")]
    DomainError(&'static str),
    #[error("phase-in interval starts at {start} after it ends at {end}")]
    InvalidInterval { start: f64, end: f64 },
    #[error("limit bounds inverted: lower {lower} > upper {upper}")]
    LimitBoundsInverted { lower: f64, upper: f64 },
    #[error("no value bound for input `{0}`")]
    UnboundInput(String),
    #[error("`{0}` is not declared")]
    UnknownLocal(String),
    #[error("`{0}` does not resolve")]
    UnknownAddress(String),
}

/// A runtime failure with the span of the failing node.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{span}: {kind}")]
pub struct EvalError {
    pub kind: RuntimeErrorKind,
    pub span: SourceSpan,
}

/// A failure from [`run_program`]: the error plus the index of the
/// top-level statement that raised it.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("statement {statement_index}: {error}")]
pub struct RuntimeError {
    pub error: EvalError,
    pub statement_index: usize,
}

type EResult<T> = Result<T, EvalError>;

fn fail<T>(kind: RuntimeErrorKind, span: SourceSpan) -> EResult<T> {
    Err(EvalError { kind, span })
}

fn finite(v: f64, span: SourceSpan) -> EResult<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        fail(RuntimeErrorKind::NonFiniteResult, span)
    }
}

fn truth(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Linear phase-in: the share of `amount` in effect in `current_year` for a
/// change ramping from `start_year` to `end_year`. Equal endpoints give a
/// step at `start_year`.
pub fn phase_in_delta(
    amount: f64,
    start_year: f64,
    end_year: f64,
    current_year: Year,
) -> Result<f64, RuntimeErrorKind> {
    if start_year > end_year || start_year.is_nan() || end_year.is_nan() {
        return Err(RuntimeErrorKind::InvalidInterval { start: start_year, end: end_year });
    }
    let year = f64::from(current_year);
    if start_year == end_year {
        return Ok(if year >= start_year { amount } else { 0.0 });
    }
    let share = (year - start_year) / (end_year - start_year);
    Ok(if share <= 0.0 {
        0.0
    } else if share >= 1.0 {
        amount
    } else {
        amount * share
    })
}

/// Deltas that split `amount` across targets currently holding `values`:
/// proportional to each value, or equally when the values sum to zero.
/// The second element reports whether the equal-split fallback was used.
pub fn proportional_deltas(amount: f64, values: &[f64]) -> (Vec<f64>, bool) {
    let total: f64 = values.iter().sum();
    if total == 0.0 {
        let share = amount / values.len() as f64;
        (vec![share; values.len()], true)
    } else {
        (values.iter().map(|v| amount * (v / total)).collect(), false)
    }
}

/// Mass-weighted mean lifetime: `sum(v_i * L_i) / sum(v_i)`, falling back to
/// the unweighted mean of `L_i` when all masses are zero.
pub fn weighted_lifetime(values_and_lifetimes: &[(f64, f64)]) -> (f64, bool) {
    let mass: f64 = values_and_lifetimes.iter().map(|(v, _)| v).sum();
    if mass == 0.0 {
        let n = values_and_lifetimes.len() as f64;
        (values_and_lifetimes.iter().map(|(_, l)| l).sum::<f64>() / n, true)
    } else {
        (values_and_lifetimes.iter().map(|(v, l)| v * l).sum::<f64>() / mass, false)
    }
}

enum Slot {
    Cell(usize, usize),
    Global(usize),
    Input(String),
}

struct Interpreter<'s> {
    state: &'s mut RuntimeState,
    diagnostics: ExecDiagnostics,
}

impl Interpreter<'_> {
    fn resolve(&self, a: &Address) -> EResult<Slot> {
        let vocab = &self.state.frame.vocabulary;
        let unknown = || EvalError { kind: RuntimeErrorKind::UnknownAddress(a.to_string()), span: a.span };
        match (a.namespace, a.segments.as_slice()) {
            (Namespace::In, [name]) => Ok(Slot::Input(name.clone())),
            (Namespace::Out, [region, attribute]) => {
                let attr = vocab.attribute_index(attribute).ok_or_else(unknown)?;
                if region == GLOBAL_REGION {
                    Ok(Slot::Global(attr))
                } else {
                    Ok(Slot::Cell(vocab.region_index(region).ok_or_else(unknown)?, attr))
                }
            }
            _ => Err(unknown()),
        }
    }

    fn read(&self, a: &Address) -> EResult<f64> {
        match self.resolve(a)? {
            Slot::Cell(r, at) => Ok(self.state.frame.at(r, at)),
            Slot::Global(at) => Ok(self.state.frame.global(at)),
            Slot::Input(name) => match self.state.inputs.get(&name) {
                Some(v) => Ok(*v),
                None => fail(RuntimeErrorKind::UnboundInput(name), a.span),
            },
        }
    }

    fn writable(&self, a: &Address) -> EResult<(usize, usize)> {
        match self.resolve(a)? {
            Slot::Cell(r, at) => Ok((r, at)),
            _ => fail(RuntimeErrorKind::UnknownAddress(a.to_string()), a.span),
        }
    }

    /// Writes a value, clamping negatives to zero with a diagnostic.
    fn write(&mut self, cell: (usize, usize), a: &Address, span: SourceSpan, value: f64) -> EResult<()> {
        let value = finite(value, span)?;
        let stored = if value < 0.0 {
            self.diagnostics.clamps_applied.push(ClampRecord {
                address: a.to_string(),
                span,
                before: value,
                after: 0.0,
            });
            0.0
        } else if value == 0.0 {
            0.0
        } else {
            value
        };
        self.state.frame.set_at(cell.0, cell.1, stored);
        Ok(())
    }

    fn lifecycle(&mut self, targets: &[Address], span: SourceSpan) -> EResult<f64> {
        let vocab = self.state.frame.vocabulary.clone();
        let mut pairs = Vec::with_capacity(targets.len());
        for t in targets {
            let lifetime = t
                .segments
                .get(1)
                .and_then(|attr| vocab.lifetimes().mean_lifetime(attr))
                .ok_or_else(|| EvalError { kind: RuntimeErrorKind::UnknownAddress(t.to_string()), span: t.span })?;
            pairs.push((self.read(t)?, lifetime));
        }
        let (value, guarded) = weighted_lifetime(&pairs);
        if guarded {
            self.diagnostics.divisions_guarded += 1;
        }
        finite(value, span)
    }

    fn eval(&mut self, e: &Expr) -> EResult<f64> {
        let span = e.span;
        match &e.kind {
            ExprKind::Number(n) => Ok(n.value()),
            ExprKind::Address(a) => self.read(a),
            ExprKind::Local(name) => match self.state.locals.get(name) {
                Some(v) => Ok(*v),
                None => fail(RuntimeErrorKind::UnknownLocal(name.clone()), span),
            },
            ExprKind::Unary { op, operand } => {
                let v = self.eval(operand)?;
                Ok(match op {
                    UnaryOp::Neg => -v,
                    UnaryOp::Not => truth(v == 0.0),
                })
            }
            ExprKind::Binary { op: BinaryOp::And, lhs, rhs } => {
                if self.eval(lhs)? == 0.0 {
                    return Ok(0.0);
                }
                Ok(truth(self.eval(rhs)? != 0.0))
            }
            ExprKind::Binary { op: BinaryOp::Or, lhs, rhs } => {
                if self.eval(lhs)? != 0.0 {
                    return Ok(1.0);
                }
                Ok(truth(self.eval(rhs)? != 0.0))
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let l = self.eval(lhs)?;
                let r = self.eval(rhs)?;
                match op {
                    BinaryOp::Add => finite(l + r, span),
                    BinaryOp::Sub => finite(l - r, span),
                    BinaryOp::Mul => finite(l * r, span),
                    BinaryOp::Div => {
                        if r == 0.0 {
                            return fail(RuntimeErrorKind::DivisionByZero, span);
                        }
                        finite(l / r, span)
                    }
                    BinaryOp::Pow => {
                        if l == 0.0 && r < 0.0 {
                            return fail(RuntimeErrorKind::DomainError("zero to a negative power"), span);
                        }
                        let v = l.powf(r);
                        if v.is_nan() {
                            return fail(RuntimeErrorKind::DomainError("negative base with fractional exponent"), span);
                        }
                        finite(v, span)
                    }
                    BinaryOp::Lt => Ok(truth(l < r)),
                    BinaryOp::Le => Ok(truth(l <= r)),
                    BinaryOp::Gt => Ok(truth(l > r)),
                    BinaryOp::Ge => Ok(truth(l >= r)),
                    BinaryOp::Eq => Ok(truth(l == r)),
                    BinaryOp::Ne => Ok(truth(l != r)),
                    BinaryOp::And | BinaryOp::Or => unreachable!("handled above"),
                }
            }
            ExprKind::Ternary { cond, then, otherwise } => {
                if self.eval(cond)? != 0.0 {
                    self.eval(then)
                } else {
                    self.eval(otherwise)
                }
            }
            ExprKind::Call { builtin, args } => {
                let a = self.eval(&args[0])?;
                Ok(match builtin {
                    Builtin::Abs => a.abs(),
                    Builtin::Floor => a.floor(),
                    Builtin::Ceil => a.ceil(),
                    // half away from zero
                    Builtin::Round => a.round(),
                    Builtin::Min => a.min(self.eval(&args[1])?),
                    Builtin::Max => a.max(self.eval(&args[1])?),
                })
            }
            ExprKind::Lifecycle(targets) => self.lifecycle(targets, span),
        }
    }

    fn block(&mut self, b: &Block) -> EResult<()> {
        for s in &b.statements {
            self.stmt(s)?;
        }
        Ok(())
    }

    fn stmt(&mut self, s: &Stmt) -> EResult<()> {
        match &s.kind {
            StmtKind::VarDecl { name, value } => {
                let v = self.eval(value)?;
                self.state.locals.insert(name.clone(), v);
            }
            StmtKind::Assign { target, value } => {
                let v = self.eval(value)?;
                let cell = self.writable(target)?;
                self.write(cell, target, s.span, v)?;
            }
            StmtKind::Change { target, amount, start_year, end_year } => {
                let amount_v = self.eval(amount)?;
                let start = self.eval(start_year)?;
                let end = self.eval(end_year)?;
                let delta = phase_in_delta(amount_v, start, end, self.state.current_year)
                    .map_err(|kind| EvalError { kind, span: s.span })?;
                let cell = self.writable(target)?;
                let current = self.state.frame.at(cell.0, cell.1);
                self.write(cell, target, s.span, current + delta)?;
            }
            StmtKind::Distribute { amount, targets, .. } => {
                let amount_v = self.eval(amount)?;
                let cells = targets.iter().map(|t| self.writable(t)).collect::<EResult<Vec<_>>>()?;
                // Read every target before writing any.
                let before: Vec<f64> = cells.iter().map(|&(r, a)| self.state.frame.at(r, a)).collect();
                let (deltas, guarded) = proportional_deltas(amount_v, &before);
                if guarded {
                    self.diagnostics.divisions_guarded += 1;
                }
                for ((cell, target), (v, d)) in cells.iter().zip(targets).zip(before.iter().zip(&deltas)) {
                    self.write(*cell, target, s.span, v + d)?;
                }
            }
            StmtKind::Limit { target, lower, upper } => {
                let lo = self.eval(lower)?;
                let hi = self.eval(upper)?;
                if lo > hi || lo.is_nan() || hi.is_nan() {
                    return fail(RuntimeErrorKind::LimitBoundsInverted { lower: lo, upper: hi }, s.span);
                }
                let cell = self.writable(target)?;
                let current = self.state.frame.at(cell.0, cell.1);
                let bounded = current.clamp(lo, hi);
                if bounded != current {
                    self.diagnostics.clamps_applied.push(ClampRecord {
                        address: target.to_string(),
                        span: s.span,
                        before: current,
                        after: bounded,
                    });
                    self.write(cell, target, s.span, bounded)?;
                }
            }
            StmtKind::If { cond, then_block, else_block } => {
                if self.eval(cond)? != 0.0 {
                    self.block(then_block)?;
                } else if let Some(b) = else_block {
                    self.block(b)?;
                }
            }
        }
        Ok(())
    }
}

/// Evaluates one expression against `state` without modifying it.
pub fn evaluate(expr: &Expr, state: &RuntimeState) -> Result<f64, EvalError> {
    let mut scratch = state.clone();
    Interpreter { state: &mut scratch, diagnostics: ExecDiagnostics::default() }.eval(expr)
}

/// Lifetime expectation for the given consumption addresses in the current frame.
pub fn lifecycle_expectation(targets: &[Address], state: &RuntimeState) -> Result<f64, EvalError> {
    let mut scratch = state.clone();
    let span = targets.first().map(|a| a.span).unwrap_or_default();
    Interpreter { state: &mut scratch, diagnostics: ExecDiagnostics::default() }.lifecycle(targets, span)
}

/// Executes a single statement in place. On error `state` may be partially
/// updated; use [`run_program`] for all-or-nothing execution.
pub fn execute(stmt: &Stmt, state: &mut RuntimeState) -> Result<ExecDiagnostics, EvalError> {
    let mut interp = Interpreter { state, diagnostics: ExecDiagnostics::default() };
    interp.stmt(stmt)?;
    Ok(interp.diagnostics)
}

/// Runs every statement in order. Locals start empty. If any statement
/// fails, `state` is left exactly as it was before the call.
pub fn run_program(program: &CheckedProgram, state: &mut RuntimeState) -> Result<ExecDiagnostics, RuntimeError> {
    let mut work = state.clone();
    work.locals.clear();
    let mut interp = Interpreter { state: &mut work, diagnostics: ExecDiagnostics::default() };
    for (i, stmt) in program.statements().iter().enumerate() {
        interp.stmt(stmt).map_err(|error| RuntimeError { error, statement_index: i })?;
    }
    let diagnostics = interp.diagnostics;
    *state = work;
    Ok(diagnostics)
}
