//! SMT-LIB2 rendering of constraint sets, for debugging against external solvers.

use crate::rational::Rational;
use crate::spec::Sort;
use crate::symbolic::{CmpOp, LinAtom, Names, SymExpr, Var};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;
use std::fmt::Write;

fn ident(v: &Var, names: &Names) -> String {
    let s = names.var(v).to_string();
    if s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        s
    } else {
        format!("|{s}|")
    }
}

fn number(r: &Rational) -> String {
    let mag = r.abs();
    let body = if mag.is_integer() {
        format!("{}.0", mag.numer())
    } else {
        format!("(/ {}.0 {}.0)", mag.numer(), mag.denom())
    };
    if r.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

fn atom(a: &LinAtom, names: &Names) -> String {
    let terms: Vec<String> = a
        .lhs
        .iter()
        .map(|(v, c)| {
            if c.is_one() {
                ident(v, names)
            } else {
                format!("(* {} {})", number(c), ident(v, names))
            }
        })
        .collect();
    let lhs = match terms.len() {
        0 => number(&Rational::zero()),
        1 => terms[0].clone(),
        _ => format!("(+ {})", terms.join(" ")),
    };
    let op = match a.op {
        CmpOp::Lt => "<",
        CmpOp::Le => "<=",
        CmpOp::Eq => "=",
        CmpOp::Ge => ">=",
        CmpOp::Gt => ">",
    };
    format!("({op} {lhs} {})", number(&a.rhs))
}

pub fn term(e: &SymExpr, names: &Names) -> String {
    match e {
        SymExpr::Const(b) => b.to_string(),
        SymExpr::Var(v) => ident(v, names),
        SymExpr::Atom(a) => atom(a, names),
        SymExpr::Not(x) => format!("(not {})", term(x, names)),
        SymExpr::And(xs) | SymExpr::Or(xs) => {
            let op = if matches!(e, SymExpr::And(_)) {
                "and"
            } else {
                "or"
            };
            let parts: Vec<String> = xs.iter().map(|x| term(x, names)).collect();
            format!("({op} {})", parts.join(" "))
        }
        SymExpr::Xor(a, b) => format!("(xor {} {})", term(a, names), term(b, names)),
        SymExpr::Iff(a, b) => format!("(= {} {})", term(a, names), term(b, names)),
        SymExpr::Ite(c, t, f) => format!(
            "(ite {} {} {})",
            term(c, names),
            term(t, names),
            term(f, names)
        ),
    }
}

/// A complete script: declarations, one assertion per constraint, `check-sat`.
pub fn script<'a>(cs: impl IntoIterator<Item = &'a SymExpr> + Clone, names: &Names) -> String {
    let mut vars = BTreeSet::new();
    for c in cs.clone() {
        c.collect_vars(&mut vars);
    }
    let mut out = String::from("(set-logic QF_LRA)\n");
    for v in &vars {
        let sort = match v.sort {
            Sort::Bool => "Bool",
            Sort::Real => "Real",
        };
        writeln!(out, "(declare-fun {} () {sort})", ident(v, names)).unwrap();
    }
    for c in cs {
        writeln!(out, "(assert {})", term(c, names)).unwrap();
    }
    out.push_str("(check-sat)\n");
    out
}
