//! Pretty printer for the surface syntax.
//!
//! Printing is the inverse of parsing: `parse(print(m))` is structurally
//! equal to `m`. Operators associate to the left, so right operands at equal
//! precedence are parenthesized to preserve tree shape, and predicates that
//! equal the defaults (init `false`, tcp `true`, term `false`) are omitted.

use std::fmt::Write;

use crate::model::{AtomicAutomaton, Composition};
use crate::predicate::{CmpOp, Expr, Predicate};
use crate::syntax::ModelFile;

const PREC_OR: u8 = 1;
const PREC_AND: u8 = 2;
const PREC_NOT: u8 = 3;
const PREC_CMP: u8 = 4;
const PREC_SUM: u8 = 5;
const PREC_MUL: u8 = 6;
const PREC_NEG: u8 = 7;
const PREC_ATOM: u8 = 8;

fn pred_prec(p: &Predicate) -> u8 {
    match p {
        Predicate::Or(..) => PREC_OR,
        Predicate::And(..) => PREC_AND,
        Predicate::Not(..) => PREC_NOT,
        Predicate::Cmp(..) => PREC_CMP,
        Predicate::Lit(..) => PREC_ATOM,
    }
}

fn expr_prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => PREC_SUM,
        Expr::Mul(..) => PREC_MUL,
        Expr::Neg(..) => PREC_NEG,
        Expr::Const(..) | Expr::Var(..) | Expr::Exp(..) => PREC_ATOM,
    }
}

fn write_expr(out: &mut String, e: &Expr, min: u8) {
    let prec = expr_prec(e);
    let parens = prec < min;
    if parens {
        out.push('(');
    }
    match e {
        Expr::Const(c) => {
            let _ = write!(out, "{}", c);
        }
        Expr::Var(v) => {
            let _ = write!(out, "{}", v);
        }
        Expr::Neg(inner) => {
            out.push('-');
            write_expr(out, inner, PREC_NEG);
        }
        Expr::Add(a, b) => {
            write_expr(out, a, PREC_SUM);
            out.push_str(" + ");
            write_expr(out, b, PREC_SUM + 1);
        }
        Expr::Sub(a, b) => {
            write_expr(out, a, PREC_SUM);
            out.push_str(" - ");
            write_expr(out, b, PREC_SUM + 1);
        }
        Expr::Mul(a, b) => {
            write_expr(out, a, PREC_MUL);
            out.push_str(" * ");
            write_expr(out, b, PREC_MUL + 1);
        }
        Expr::Exp(inner) => {
            out.push_str("exp(");
            write_expr(out, inner, 0);
            out.push(')');
        }
    }
    if parens {
        out.push(')');
    }
}

fn cmp_str(op: CmpOp) -> &'static str {
    match op {
        CmpOp::Eq => "=",
        CmpOp::Ne => "!=",
        CmpOp::Lt => "<",
        CmpOp::Le => "<=",
        CmpOp::Gt => ">",
        CmpOp::Ge => ">=",
    }
}

fn write_pred(out: &mut String, p: &Predicate, min: u8) {
    let prec = pred_prec(p);
    let parens = prec < min;
    if parens {
        out.push('(');
    }
    match p {
        Predicate::Lit(b) => {
            let _ = write!(out, "{}", b);
        }
        Predicate::Cmp(op, a, b) => {
            write_expr(out, a, PREC_SUM);
            let _ = write!(out, " {} ", cmp_str(*op));
            write_expr(out, b, PREC_SUM);
        }
        Predicate::Not(inner) => {
            out.push_str("not ");
            write_pred(out, inner, PREC_NOT);
        }
        Predicate::And(a, b) => {
            write_pred(out, a, PREC_AND);
            out.push_str(" and ");
            write_pred(out, b, PREC_AND + 1);
        }
        Predicate::Or(a, b) => {
            write_pred(out, a, PREC_OR);
            out.push_str(" or ");
            write_pred(out, b, PREC_OR + 1);
        }
    }
    if parens {
        out.push(')');
    }
}

/// Renders a predicate in surface syntax.
pub fn predicate_to_string(p: &Predicate) -> String {
    let mut out = String::new();
    write_pred(&mut out, p, 0);
    out
}

/// Renders an arithmetic expression in surface syntax.
pub fn expr_to_string(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, 0);
    out
}

fn write_automaton(out: &mut String, a: &AtomicAutomaton, indent: usize) {
    let pad = "  ".repeat(indent);
    let _ = writeln!(out, "{}automaton {} {{", pad, a.name);
    for v in &a.locations {
        let _ = writeln!(out, "{}  location {} {{", pad, v);
        let init = a.init_of(v);
        if init != &Predicate::FALSE {
            let _ = writeln!(out, "{}    init {}", pad, predicate_to_string(init));
        }
        let tcp = a.tcp_of(v);
        if tcp != &Predicate::TRUE {
            let _ = writeln!(out, "{}    tcp {}", pad, predicate_to_string(tcp));
        }
        let term = a.term_of(v);
        if term != &Predicate::FALSE {
            let _ = writeln!(out, "{}    term {}", pad, predicate_to_string(term));
        }
        if let Some(sub) = a.hierarchy.get(v) {
            let _ = write!(out, "{}    sub ", pad);
            write_comp_inline(out, sub, indent + 2);
        }
        for e in a.edges_from(v) {
            let _ = writeln!(
                out,
                "{}    edge {} : {} : {} -> {}",
                pad,
                predicate_to_string(&e.guard),
                e.action,
                predicate_to_string(&e.reset),
                e.target
            );
        }
        let _ = writeln!(out, "{}  }}", pad);
    }
    let _ = writeln!(out, "{}}}", pad);
}

/// Writes a composition starting at the current cursor; nested automata are
/// indented relative to `indent`.
fn write_comp_inline(out: &mut String, c: &Composition, indent: usize) {
    match c {
        Composition::Atomic(a) => {
            // The `automaton` keyword lands on the current line.
            let mut rendered = String::new();
            write_automaton(&mut rendered, a, indent);
            out.push_str(rendered.trim_start());
        }
        Composition::Parallel { left, sync, right } => {
            write_parallel(out, left, sync, right, indent);
        }
        Composition::Postfix { .. } => {
            unreachable!("auxiliary postfix terms have no surface syntax")
        }
    }
}

fn write_parallel(
    out: &mut String,
    left: &Composition,
    sync: &std::collections::BTreeSet<String>,
    right: &Composition,
    indent: usize,
) {
    let pad = "  ".repeat(indent);
    match left {
        Composition::Parallel { left: l, sync: s, right: r } => write_parallel(out, l, s, r, indent),
        other => write_comp_operand(out, other, indent),
    }
    let actions: Vec<&str> = sync.iter().map(|s| s.as_str()).collect();
    let _ = writeln!(out, "{}|| {{{}}}", pad, actions.join(", "));
    // Right operands that are themselves parallel need parentheses to keep
    // the tree shape under left-associative parsing.
    if matches!(right, Composition::Parallel { .. }) {
        let _ = writeln!(out, "{}(", pad);
        write_comp_operand(out, right, indent + 1);
        let _ = writeln!(out, "{})", pad);
    } else {
        write_comp_operand(out, right, indent);
    }
}

fn write_comp_operand(out: &mut String, c: &Composition, indent: usize) {
    match c {
        Composition::Atomic(a) => write_automaton(out, a, indent),
        Composition::Parallel { left, sync, right } => write_parallel(out, left, sync, right, indent),
        Composition::Postfix { .. } => {
            unreachable!("auxiliary postfix terms have no surface syntax")
        }
    }
}

/// Renders a model file in surface syntax.
pub fn print(file: &ModelFile) -> String {
    let mut out = String::new();
    for d in &file.decls {
        let kw = match d.kind {
            crate::model::VarKind::Discrete => "disc",
            crate::model::VarKind::Continuous => "cont",
        };
        let _ = writeln!(out, "{} {}", kw, d.name);
    }
    if !file.decls.is_empty() {
        out.push('\n');
    }
    write_comp_operand(&mut out, &file.comp, 0);
    out
}
