//! Canonical CSX text for syntax trees. `parse(pretty_print(s))` yields `s`
//! up to spans.

use std::fmt::Write;

use super::ast::*;

const INDENT: &str = "  ";
const UNARY_PRECEDENCE: u8 = 7;
const POSTFIX_PRECEDENCE: u8 = 8;

pub fn pretty_print(spec: &Spec) -> String {
    let mut blocks = Vec::new();
    blocks.extend(spec.types.iter().map(print_type));
    blocks.extend(spec.actions.iter().map(print_action));
    blocks.extend(spec.devices.iter().map(print_device));
    blocks.extend(spec.scenarios.iter().map(print_scenario));
    blocks.join("\n")
}

pub fn print_type(t: &TypeDef) -> String {
    let mut out = format!("type {} {{\n", t.name);
    for p in &t.props {
        let _ = writeln!(out, "{INDENT}{}: {}", p.name, p.ty);
    }
    print_members(&mut out, &t.derived, &t.constraints);
    out.push_str("}\n");
    out
}

pub fn print_action(a: &ActionDef) -> String {
    let params = a
        .loc_params
        .iter()
        .map(|l| format!("{}: {}", l.name, l.ty))
        .collect::<Vec<_>>()
        .join(", ");
    let mut out = format!("action {}({}) {{\n", a.name, params);
    for p in &a.params {
        let _ = writeln!(out, "{INDENT}parameter {}: {}", p.name, p.ty);
    }
    print_members(&mut out, &a.derived, &a.constraints);
    out.push_str("}\n");
    out
}

pub fn print_device(d: &DeviceDef) -> String {
    let mut out = format!("device {} {{\n", d.name);
    for l in &d.locations {
        let _ = writeln!(out, "{INDENT}location {}: {}", l.name, l.ty);
    }
    for c in &d.components {
        out.push_str(&print_component(c));
    }
    print_members(&mut out, &d.derived, &d.constraints);
    out.push_str("}\n");
    out
}

fn print_component(c: &ComponentDef) -> String {
    let args = c
        .loc_args
        .iter()
        .map(Ident::as_str)
        .collect::<Vec<_>>()
        .join(", ");
    let mut out = format!("{INDENT}component {} = {}({})", c.name, c.action, args);
    if c.constraints.is_empty() {
        out.push('\n');
    } else {
        out.push_str(" {\n");
        for e in &c.constraints {
            let _ = writeln!(out, "{INDENT}{INDENT}[{}]", print_expr(e));
        }
        let _ = writeln!(out, "{INDENT}}}");
    }
    out
}

pub fn print_scenario(s: &ScenarioDef) -> String {
    let mut out = format!("scenario {} for {} {{\n", s.name, s.device);
    for b in &s.bindings {
        let _ = writeln!(out, "{INDENT}{} = {}", b.path, b.value);
    }
    for e in &s.constraints {
        let _ = writeln!(out, "{INDENT}[{}]", print_expr(e));
    }
    if let Some(o) = &s.objective {
        let _ = writeln!(out, "{INDENT}objective {} {}", o.sense, print_expr(&o.expr));
    }
    for e in &s.expectations {
        let _ = writeln!(out, "{INDENT}expect [{}]", print_expr(e));
    }
    out.push_str("}\n");
    out
}

fn print_members(out: &mut String, derived: &[DerivedDef], constraints: &[Expr]) {
    for d in derived {
        let _ = writeln!(out, "{INDENT}derived {} = {}", d.name, print_expr(&d.body));
    }
    for e in constraints {
        let _ = writeln!(out, "{INDENT}[{}]", print_expr(e));
    }
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

fn precedence(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Binary(op, _, _) => op.precedence(),
        ExprKind::Unary(_, _) => UNARY_PRECEDENCE,
        _ => POSTFIX_PRECEDENCE,
    }
}

/// True when the printed form of `e` begins with an integer literal, which
/// would fuse with a preceding `-` into a negative literal.
fn starts_with_int(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Int(_) => true,
        ExprKind::Proj(base, _) => starts_with_int(base),
        ExprKind::Binary(_, l, _) => starts_with_int(l),
        _ => false,
    }
}

fn write_wrapped(out: &mut String, e: &Expr, wrap: bool) {
    if wrap {
        out.push('(');
        write_expr(out, e);
        out.push(')');
    } else {
        write_expr(out, e);
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match &e.kind {
        ExprKind::Int(v) => {
            let _ = write!(out, "{v}");
        }
        ExprKind::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        ExprKind::Ref(x) => out.push_str(x.as_str()),
        ExprKind::Proj(base, field) => {
            write_wrapped(out, base, precedence(base) < POSTFIX_PRECEDENCE);
            out.push('.');
            out.push_str(field.as_str());
        }
        ExprKind::Unary(UnaryOp::Neg, operand) => {
            out.push('-');
            let wrap = precedence(operand) < UNARY_PRECEDENCE || starts_with_int(operand);
            write_wrapped(out, operand, wrap);
        }
        ExprKind::Unary(UnaryOp::Not, operand) => {
            out.push_str("not ");
            write_wrapped(out, operand, precedence(operand) < UNARY_PRECEDENCE);
        }
        ExprKind::Binary(op, l, r) => {
            let p = op.precedence();
            let (wrap_l, wrap_r) = match op {
                BinaryOp::Implies => (precedence(l) <= p, precedence(r) < p),
                _ if op.is_comparison() => (precedence(l) <= p, precedence(r) <= p),
                _ => (precedence(l) < p, precedence(r) <= p),
            };
            write_wrapped(out, l, wrap_l);
            let _ = write!(out, " {} ", op.symbol());
            write_wrapped(out, r, wrap_r);
        }
    }
}
