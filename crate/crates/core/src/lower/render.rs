use std::fmt::Write;

use super::model::{ConstraintModel, FlatExpr};
use crate::syntax::{BinaryOp, PrimType, Sense, UnaryOp};

/// Output format for [`render_model`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dialect {
    /// Solver interchange text: declarations, fully parenthesised constraints
    /// and a solve item.
    Interchange,
    /// Human-readable dump with minimal parentheses.
    Debug,
}

pub fn render_model(model: &ConstraintModel, dialect: Dialect) -> String {
    match dialect {
        Dialect::Interchange => render_interchange(model),
        Dialect::Debug => render_debug(model),
    }
}

fn render_interchange(model: &ConstraintModel) -> String {
    let mut out = String::new();
    for (name, sort) in &model.vars {
        let _ = writeln!(out, "var {sort} : {name};");
    }
    for c in &model.constraints {
        let _ = writeln!(out, "constraint {};", interchange_expr(c));
    }
    match &model.objective {
        None => out.push_str("solve satisfy;\n"),
        Some((sense, e)) => {
            let _ = writeln!(out, "solve {sense} {};", interchange_expr(e));
        }
    }
    out
}

fn interchange_op(op: BinaryOp) -> &'static str {
    match op {
        BinaryOp::And => "/\\",
        BinaryOp::Or => "\\/",
        BinaryOp::Implies => "->",
        other => other.symbol(),
    }
}

pub fn interchange_expr(e: &FlatExpr) -> String {
    match e {
        FlatExpr::Int(v) => v.to_string(),
        FlatExpr::Bool(b) => b.to_string(),
        FlatExpr::Var(v) => v.clone(),
        FlatExpr::Unary(UnaryOp::Neg, x) => format!("(-{})", interchange_expr(x)),
        FlatExpr::Unary(UnaryOp::Not, x) => format!("(not {})", interchange_expr(x)),
        FlatExpr::Binary(op, l, r) => format!(
            "({} {} {})",
            interchange_expr(l),
            interchange_op(*op),
            interchange_expr(r)
        ),
    }
}

fn render_debug(model: &ConstraintModel) -> String {
    let mut out = String::new();
    let ints = model.vars.values().filter(|s| **s == PrimType::Int).count();
    let _ = writeln!(
        out,
        "{} variables ({} int, {} bool), {} constraints",
        model.num_vars(),
        ints,
        model.num_vars() - ints,
        model.num_constraints()
    );
    for (name, sort) in &model.vars {
        let _ = writeln!(out, "  {name}: {sort}");
    }
    for c in &model.constraints {
        let _ = writeln!(out, "  [{}]", debug_expr(c));
    }
    if let Some((sense, e)) = &model.objective {
        let word = match sense {
            Sense::Minimize => "minimize",
            Sense::Maximize => "maximize",
        };
        let _ = writeln!(out, "  {word} {}", debug_expr(e));
    }
    out
}

fn precedence(e: &FlatExpr) -> u8 {
    match e {
        FlatExpr::Binary(op, ..) => op.precedence(),
        FlatExpr::Unary(..) => 7,
        _ => 8,
    }
}

/// Expression text using CSX operators and only the parentheses needed.
pub fn debug_expr(e: &FlatExpr) -> String {
    match e {
        FlatExpr::Int(v) => v.to_string(),
        FlatExpr::Bool(b) => b.to_string(),
        FlatExpr::Var(v) => v.clone(),
        FlatExpr::Unary(op, x) => {
            let inner = wrap(x, precedence(x) < 7 || matches!(**x, FlatExpr::Int(_)));
            match op {
                UnaryOp::Neg => format!("-{inner}"),
                UnaryOp::Not => format!("not {inner}"),
            }
        }
        FlatExpr::Binary(op, l, r) => {
            let p = op.precedence();
            let (wl, wr) = if *op == BinaryOp::Implies {
                (precedence(l) <= p, precedence(r) < p)
            } else if op.is_comparison() {
                (precedence(l) <= p, precedence(r) <= p)
            } else {
                (precedence(l) < p, precedence(r) <= p)
            };
            format!("{} {} {}", wrap(l, wl), op.symbol(), wrap(r, wr))
        }
    }
}

fn wrap(e: &FlatExpr, yes: bool) -> String {
    if yes {
        format!("({})", debug_expr(e))
    } else {
        debug_expr(e)
    }
}
