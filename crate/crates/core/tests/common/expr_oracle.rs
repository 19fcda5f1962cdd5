//! Random expression trees, rendered to source text with the fewest
//! parentheses the standard precedence table allows, and a direct-recursion
//! evaluator over the trees themselves. The library parser never sees the
//! tree, only the text.

use std::collections::HashMap;

use rand::seq::IndexedRandom;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bin {
    Or,
    And,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl Bin {
    const ALL: [Bin; 13] = [
        Bin::Or,
        Bin::And,
        Bin::Lt,
        Bin::Le,
        Bin::Gt,
        Bin::Ge,
        Bin::Eq,
        Bin::Ne,
        Bin::Add,
        Bin::Sub,
        Bin::Mul,
        Bin::Div,
        Bin::Pow,
    ];

    fn text(self) -> &'static str {
        match self {
            Bin::Or => "or",
            Bin::And => "and",
            Bin::Lt => "<",
            Bin::Le => "<=",
            Bin::Gt => ">",
            Bin::Ge => ">=",
            Bin::Eq => "==",
            Bin::Ne => "!=",
            Bin::Add => "+",
            Bin::Sub => "-",
            Bin::Mul => "*",
            Bin::Div => "/",
            Bin::Pow => "^",
        }
    }

    /// 1 = loosest binary level; ternary is 0, unary 7, atoms 8.
    fn level(self) -> u8 {
        match self {
            Bin::Or => 1,
            Bin::And => 2,
            Bin::Lt | Bin::Le | Bin::Gt | Bin::Ge | Bin::Eq | Bin::Ne => 3,
            Bin::Add | Bin::Sub => 4,
            Bin::Mul | Bin::Div => 5,
            Bin::Pow => 6,
        }
    }
}

const UNARY: u8 = 7;
const ATOM: u8 = 8;

#[derive(Debug, Clone)]
pub enum Tree {
    Num(&'static str, f64),
    Var(&'static str),
    Neg(Box<Tree>),
    Not(Box<Tree>),
    Bin(Bin, Box<Tree>, Box<Tree>),
    Tern(Box<Tree>, Box<Tree>, Box<Tree>),
    Call(&'static str, Vec<Tree>),
}

const LITERALS: [(&str, f64); 10] = [
    ("0", 0.0),
    ("1", 1.0),
    ("2", 2.0),
    ("3", 3.0),
    ("0.5", 0.5),
    ("2.25", 2.25),
    ("10", 10.0),
    ("7.5", 7.5),
    ("50%", 0.5),
    ("12.5%", 0.125),
];

/// Names the evaluation environment must bind; see [`environment`].
pub const VARIABLES: [&str; 5] = [
    "in.a",
    "in.b",
    "in.zero",
    "out.china.eolRecyclingMT",
    "out.global.eolMismanagedMT",
];

pub fn generate(rng: &mut impl Rng, depth: u32) -> Tree {
    if depth == 0 || rng.random_bool(0.2) {
        return if rng.random_bool(0.7) {
            let (text, v) = *LITERALS.choose(rng).unwrap();
            Tree::Num(text, v)
        } else {
            Tree::Var(VARIABLES.choose(rng).unwrap())
        };
    }
    let d = depth - 1;
    match rng.random_range(0..20) {
        0 => Tree::Neg(Box::new(generate(rng, d))),
        1 => Tree::Not(Box::new(generate(rng, d))),
        2 => Tree::Tern(Box::new(generate(rng, d)), Box::new(generate(rng, d)), Box::new(generate(rng, d))),
        3 => {
            let name = *["abs", "floor", "ceil", "round"].choose(rng).unwrap();
            Tree::Call(name, vec![generate(rng, d)])
        }
        4 => {
            let name = *["min", "max"].choose(rng).unwrap();
            Tree::Call(name, vec![generate(rng, d), generate(rng, d)])
        }
        _ => {
            let op = *Bin::ALL.choose(rng).unwrap();
            Tree::Bin(op, Box::new(generate(rng, d)), Box::new(generate(rng, d)))
        }
    }
}

fn level(t: &Tree) -> u8 {
    match t {
        Tree::Num(..) | Tree::Var(_) | Tree::Call(..) => ATOM,
        Tree::Neg(_) | Tree::Not(_) => UNARY,
        Tree::Bin(op, ..) => op.level(),
        Tree::Tern(..) => 0,
    }
}

/// Source text for `t`. With `extra_parens`, some redundant parentheses are
/// added at random.
pub fn render(t: &Tree, rng: &mut impl Rng, extra_parens: f64) -> String {
    let mut out = String::new();
    write_tree(t, 0, rng, extra_parens, &mut out);
    out
}

fn write_tree(t: &Tree, min_level: u8, rng: &mut impl Rng, extra: f64, out: &mut String) {
    let wrap = level(t) < min_level || (extra > 0.0 && rng.random_bool(extra));
    if wrap {
        out.push('(');
    }
    match t {
        Tree::Num(text, _) => out.push_str(text),
        Tree::Var(name) => out.push_str(name),
        Tree::Neg(x) => {
            out.push('-');
            // Keep `- -x` from lexing as anything odd.
            out.push(' ');
            write_tree(x, UNARY, rng, extra, out);
        }
        Tree::Not(x) => {
            out.push_str("not ");
            write_tree(x, UNARY, rng, extra, out);
        }
        Tree::Bin(op, l, r) => {
            let p = op.level();
            let (lmin, rmin) = if *op == Bin::Pow { (UNARY, p) } else { (p, p + 1) };
            write_tree(l, lmin, rng, extra, out);
            out.push(' ');
            out.push_str(op.text());
            out.push(' ');
            write_tree(r, rmin, rng, extra, out);
        }
        Tree::Tern(c, a, b) => {
            write_tree(c, 1, rng, extra, out);
            out.push_str(" ? ");
            write_tree(a, 0, rng, extra, out);
            out.push_str(" : ");
            write_tree(b, 0, rng, extra, out);
        }
        Tree::Call(name, args) => {
            out.push_str(name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_tree(a, 0, rng, extra, out);
            }
            out.push(')');
        }
    }
    if wrap {
        out.push(')');
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    DivisionByZero,
    NonFinite,
    Domain,
}

fn b(v: bool) -> f64 {
    if v {
        1.0
    } else {
        0.0
    }
}

fn finite(v: f64) -> Result<f64, Failure> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::NonFinite)
    }
}

pub fn eval(t: &Tree, env: &HashMap<&str, f64>) -> Result<f64, Failure> {
    match t {
        Tree::Num(_, v) => Ok(*v),
        Tree::Var(name) => Ok(env[name]),
        Tree::Neg(x) => Ok(-eval(x, env)?),
        Tree::Not(x) => Ok(b(eval(x, env)? == 0.0)),
        Tree::Bin(Bin::And, l, r) => {
            if eval(l, env)? == 0.0 {
                Ok(0.0)
            } else {
                Ok(b(eval(r, env)? != 0.0))
            }
        }
        Tree::Bin(Bin::Or, l, r) => {
            if eval(l, env)? != 0.0 {
                Ok(1.0)
            } else {
                Ok(b(eval(r, env)? != 0.0))
            }
        }
        Tree::Bin(op, l, r) => {
            let (x, y) = (eval(l, env)?, eval(r, env)?);
            match op {
                Bin::Add => finite(x + y),
                Bin::Sub => finite(x - y),
                Bin::Mul => finite(x * y),
                Bin::Div if y == 0.0 => Err(Failure::DivisionByZero),
                Bin::Div => finite(x / y),
                Bin::Pow if x == 0.0 && y < 0.0 => Err(Failure::Domain),
                Bin::Pow if x < 0.0 && y.fract() != 0.0 => Err(Failure::Domain),
                Bin::Pow => finite(x.powf(y)),
                Bin::Lt => Ok(b(x < y)),
                Bin::Le => Ok(b(x <= y)),
                Bin::Gt => Ok(b(x > y)),
                Bin::Ge => Ok(b(x >= y)),
                Bin::Eq => Ok(b(x == y)),
                Bin::Ne => Ok(b(x != y)),
                Bin::And | Bin::Or => unreachable!(),
            }
        }
        Tree::Tern(c, x, y) => {
            if eval(c, env)? != 0.0 {
                eval(x, env)
            } else {
                eval(y, env)
            }
        }
        Tree::Call(name, args) => {
            let a = eval(&args[0], env)?;
            Ok(match *name {
                "abs" => a.abs(),
                "floor" => a.floor(),
                "ceil" => a.ceil(),
                "round" => {
                    // Half away from zero, written out longhand.
                    let t = a.abs().floor();
                    let r = if a.abs() - t >= 0.5 { t + 1.0 } else { t };
                    r.copysign(a)
                }
                "min" => {
                    let c = eval(&args[1], env)?;
                    if c < a {
                        c
                    } else {
                        a
                    }
                }
                "max" => {
                    let c = eval(&args[1], env)?;
                    if c > a {
                        c
                    } else {
                        a
                    }
                }
                other => unreachable!("{other}"),
            })
        }
    }
}

/// Values for [`VARIABLES`]: `in.*` come from the given inputs, `out.*` from
/// reading the frame directly.
pub fn environment(a: f64, b: f64, china_recycling: f64, global_mismanaged: f64) -> HashMap<&'static str, f64> {
    HashMap::from([
        ("in.a", a),
        ("in.b", b),
        ("in.zero", 0.0),
        ("out.china.eolRecyclingMT", china_recycling),
        ("out.global.eolMismanagedMT", global_mismanaged),
    ])
}
