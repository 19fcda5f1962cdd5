use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;

use super::ast::*;
use crate::projection::{AttributeKind, Vocabulary, GLOBAL_REGION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ViolationKind {
    UnknownRegion,
    UnknownAttribute,
    UnknownInput,
    BadAddressShape,
    UseBeforeDecl,
    Redeclared,
    ReadOnlyGlobal,
    ReadOnlyInput,
    NotAConsumptionSector,
    DuplicateTarget,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub span: SourceSpan,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.span, self.kind, self.message)
    }
}

/// A program that passed [`check`]. Only checked programs can be executed.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckedProgram(Program);

impl CheckedProgram {
    pub fn program(&self) -> &Program {
        &self.0
    }

    pub fn into_inner(self) -> Program {
        self.0
    }
}

impl std::ops::Deref for CheckedProgram {
    type Target = Program;

    fn deref(&self) -> &Program {
        &self.0
    }
}

struct Checker<'v> {
    vocab: &'v Vocabulary,
    inputs: Option<&'v BTreeSet<String>>,
    scopes: Vec<HashSet<String>>,
    declared: HashSet<String>,
    violations: Vec<Violation>,
}

enum Access {
    Read,
    Write,
}

impl Checker<'_> {
    fn report(&mut self, kind: ViolationKind, span: SourceSpan, message: String) {
        self.violations.push(Violation { kind, span, message });
    }

    /// Validates an address; returns the attribute kind for `out` addresses
    /// that resolve.
    fn address(&mut self, a: &Address, access: Access) -> Option<AttributeKind> {
        match a.namespace {
            Namespace::In => {
                if a.segments.len() != 1 {
                    self.report(
                        ViolationKind::BadAddressShape,
                        a.span,
                        format!("`{a}`: input addresses take exactly one segment (`in.<param>`)"),
                    );
                    return None;
                }
                if let Access::Write = access {
                    self.report(ViolationKind::ReadOnlyInput, a.span, format!("`{a}` is a read-only lever input"));
                }
                if let Some(inputs) = self.inputs {
                    if !inputs.contains(&a.segments[0]) {
                        self.report(
                            ViolationKind::UnknownInput,
                            a.span,
                            format!("lever declares no input `{}`", a.segments[0]),
                        );
                    }
                }
                None
            }
            Namespace::Out => {
                if a.segments.len() != 2 {
                    self.report(
                        ViolationKind::BadAddressShape,
                        a.span,
                        format!("`{a}`: output addresses take exactly two segments (`out.<region>.<attribute>`)"),
                    );
                    return None;
                }
                let (region, attribute) = (&a.segments[0], &a.segments[1]);
                let mut ok = true;
                if region == GLOBAL_REGION {
                    if let Access::Write = access {
                        self.report(
                            ViolationKind::ReadOnlyGlobal,
                            a.span,
                            format!("`{a}` is a computed aggregate and cannot be written"),
                        );
                    }
                } else if self.vocab.region_index(region).is_none() {
                    self.report(ViolationKind::UnknownRegion, a.span, format!("unknown region `{region}`"));
                    ok = false;
                }
                match self.vocab.attribute(attribute) {
                    Some(attr) if ok => Some(attr.kind),
                    Some(_) => None,
                    None => {
                        self.report(
                            ViolationKind::UnknownAttribute,
                            a.span,
                            format!("unknown attribute `{attribute}`"),
                        );
                        None
                    }
                }
            }
        }
    }

    fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Number(_) => {}
            ExprKind::Address(a) => {
                self.address(a, Access::Read);
            }
            ExprKind::Local(name) => {
                if !self.scopes.iter().any(|s| s.contains(name)) {
                    self.report(
                        ViolationKind::UseBeforeDecl,
                        e.span,
                        format!("`{name}` is read before any `var {name}` in scope"),
                    );
                }
            }
            ExprKind::Binary { lhs, rhs, .. } => {
                self.expr(lhs);
                self.expr(rhs);
            }
            ExprKind::Unary { operand, .. } => self.expr(operand),
            ExprKind::Ternary { cond, then, otherwise } => {
                self.expr(cond);
                self.expr(then);
                self.expr(otherwise);
            }
            ExprKind::Call { args, .. } => args.iter().for_each(|a| self.expr(a)),
            ExprKind::Lifecycle(list) => {
                for a in list {
                    if a.namespace != Namespace::Out {
                        self.report(
                            ViolationKind::NotAConsumptionSector,
                            a.span,
                            format!("`{a}` is not an output consumption address"),
                        );
                        continue;
                    }
                    match self.address(a, Access::Read) {
                        Some(AttributeKind::ConsumptionSector) | None => {}
                        Some(kind) => self.report(
                            ViolationKind::NotAConsumptionSector,
                            a.span,
                            format!("lifecycle needs consumption-sector attributes; `{a}` is {kind}"),
                        ),
                    }
                }
            }
        }
    }

    fn block(&mut self, b: &Block) {
        self.scopes.push(HashSet::new());
        for s in &b.statements {
            self.stmt(s);
        }
        self.scopes.pop();
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::VarDecl { name, value } => {
                self.expr(value);
                if !self.declared.insert(name.clone()) {
                    self.report(
                        ViolationKind::Redeclared,
                        s.span,
                        format!("`{name}` is already declared in this program"),
                    );
                }
                self.scopes.last_mut().expect("scope").insert(name.clone());
            }
            StmtKind::Assign { target, value } => {
                self.expr(value);
                self.address(target, Access::Write);
            }
            StmtKind::Change { target, amount, start_year, end_year } => {
                self.expr(amount);
                self.expr(start_year);
                self.expr(end_year);
                self.address(target, Access::Write);
            }
            StmtKind::Distribute { amount, targets, .. } => {
                self.expr(amount);
                let mut seen = HashSet::new();
                for t in targets {
                    self.address(t, Access::Write);
                    if !seen.insert((t.namespace, &t.segments)) {
                        self.report(
                            ViolationKind::DuplicateTarget,
                            t.span,
                            format!("`{t}` appears more than once in the target list"),
                        );
                    }
                }
            }
            StmtKind::Limit { target, lower, upper } => {
                self.address(target, Access::Write);
                self.expr(lower);
                self.expr(upper);
            }
            StmtKind::If { cond, then_block, else_block } => {
                self.expr(cond);
                self.block(then_block);
                if let Some(b) = else_block {
                    self.block(b);
                }
            }
        }
    }
}

/// Statically validates `program` against `vocabulary`, collecting every
/// violation. When `inputs` is given, `in.*` reads must name one of them.
pub fn check(
    program: Program,
    vocabulary: &Vocabulary,
    inputs: Option<&BTreeSet<String>>,
) -> Result<CheckedProgram, Vec<Violation>> {
    let mut checker = Checker {
        vocab: vocabulary,
        inputs,
        scopes: Vec::new(),
        declared: HashSet::new(),
        violations: Vec::new(),
    };
    checker.block(&program.body);
    if checker.violations.is_empty() {
        Ok(CheckedProgram(program))
    } else {
        Err(checker.violations)
    }
}
