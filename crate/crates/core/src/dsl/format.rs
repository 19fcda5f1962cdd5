use std::fmt::Write as _;

use super::ast::*;

const INDENT: &str = "  ";

/// Canonical text for a program: two-space indent, one statement per line,
/// minimal parentheses.
pub fn format_program(program: &Program) -> String {
    let mut out = String::new();
    write_block(&mut out, &program.body, 0);
    out
}

pub fn format_expr(expr: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, expr, Precedence::Ternary);
    out
}

fn write_comments(out: &mut String, comments: &[String], depth: usize) {
    for c in comments {
        out.push_str(&INDENT.repeat(depth));
        let _ = writeln!(out, "#{c}");
    }
}

fn write_block(out: &mut String, block: &Block, depth: usize) {
    for stmt in &block.statements {
        write_stmt(out, stmt, depth);
    }
    write_comments(out, &block.trailing_comments, depth);
}

fn address_list(list: &[Address]) -> String {
    let items: Vec<String> = list.iter().map(ToString::to_string).collect();
    format!("[{}]", items.join(", "))
}

fn write_stmt(out: &mut String, stmt: &Stmt, depth: usize) {
    write_comments(out, &stmt.comments, depth);
    let pad = INDENT.repeat(depth);
    out.push_str(&pad);
    match &stmt.kind {
        StmtKind::VarDecl { name, value } => {
            let _ = writeln!(out, "var {name} = {};", format_expr(value));
        }
        StmtKind::Assign { target, value } => {
            let _ = writeln!(out, "{target} = {};", format_expr(value));
        }
        StmtKind::Change { target, amount, start_year, end_year } => {
            let _ = writeln!(
                out,
                "change {target} by {} over {} to {};",
                format_expr(amount),
                format_expr(start_year),
                format_expr(end_year)
            );
        }
        StmtKind::Distribute { amount, targets, mode: DistributeMode::Proportional } => {
            let _ = writeln!(
                out,
                "distribute {} across {} proportionally;",
                format_expr(amount),
                address_list(targets)
            );
        }
        StmtKind::Limit { target, lower, upper } => {
            let _ = writeln!(out, "limit {target} to [{}, {}];", format_expr(lower), format_expr(upper));
        }
        StmtKind::If { cond, then_block, else_block } => {
            let _ = writeln!(out, "if {} {{", format_expr(cond));
            write_block(out, then_block, depth + 1);
            out.push_str(&pad);
            match else_block {
                Some(b) => {
                    out.push_str("} else {\n");
                    write_block(out, b, depth + 1);
                    out.push_str(&pad);
                    out.push_str("}\n");
                }
                None => out.push_str("}\n"),
            }
        }
    }
}

fn write_expr(out: &mut String, expr: &Expr, min: Precedence) {
    let prec = expr.precedence();
    let paren = prec < min;
    if paren {
        out.push('(');
    }
    match &expr.kind {
        ExprKind::Number(n) => {
            let _ = write!(out, "{}", n.literal);
            if n.percent {
                out.push('%');
            }
        }
        ExprKind::Address(a) => {
            let _ = write!(out, "{a}");
        }
        ExprKind::Local(name) => out.push_str(name),
        ExprKind::Binary { op, lhs, rhs } => {
            let (lmin, rmin) = if op.is_right_assoc() { (prec.next(), prec) } else { (prec, prec.next()) };
            write_expr(out, lhs, lmin);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, rhs, rmin);
        }
        ExprKind::Unary { op, operand } => {
            out.push_str(match op {
                UnaryOp::Neg => "-",
                UnaryOp::Not => "not ",
            });
            write_expr(out, operand, Precedence::Unary);
        }
        ExprKind::Ternary { cond, then, otherwise } => {
            write_expr(out, cond, Precedence::Or);
            out.push_str(" ? ");
            write_expr(out, then, Precedence::Ternary);
            out.push_str(" : ");
            write_expr(out, otherwise, Precedence::Ternary);
        }
        ExprKind::Call { builtin, args } => {
            out.push_str(builtin.name());
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, a, Precedence::Ternary);
            }
            out.push(')');
        }
        ExprKind::Lifecycle(list) => {
            let _ = write!(out, "lifecycle({})", address_list(list));
        }
    }
    if paren {
        out.push(')');
    }
}
