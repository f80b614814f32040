//! Affine forms over Real variables and canonical comparison atoms.

use super::var::{Names, Var};
use crate::rational::{fmt_exact, Rational};
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

/// `constant + Σ coeff·var` with every stored coefficient nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LinExpr {
    pub constant: Rational,
    pub terms: BTreeMap<Var, Rational>,
}

impl LinExpr {
    pub fn constant(c: Rational) -> Self {
        LinExpr {
            constant: c,
            terms: BTreeMap::new(),
        }
    }

    pub fn var(v: Var) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(v, Rational::one());
        LinExpr {
            constant: Rational::zero(),
            terms,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, v: &Var) -> Rational {
        self.terms.get(v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, v: Var, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(v).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&v);
        }
    }

    /// `self += k·other`
    pub fn add_scaled(&mut self, other: &LinExpr, k: &Rational) {
        if k.is_zero() {
            return;
        }
        self.constant += &other.constant * k;
        for (v, c) in &other.terms {
            self.add_term(*v, &(c * k));
        }
    }

    pub fn plus(&self, other: &LinExpr) -> LinExpr {
        let mut r = self.clone();
        r.add_scaled(other, &Rational::one());
        r
    }

    pub fn minus(&self, other: &LinExpr) -> LinExpr {
        let mut r = self.clone();
        r.add_scaled(other, &-Rational::one());
        r
    }

    pub fn scale(&self, k: &Rational) -> LinExpr {
        let mut r = LinExpr::default();
        r.add_scaled(self, k);
        r
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.terms.keys()
    }

    /// Replaces variables by affine forms.
    pub fn substitute(&self, map: &HashMap<Var, LinExpr>) -> LinExpr {
        let mut r = LinExpr::constant(self.constant.clone());
        for (v, c) in &self.terms {
            match map.get(v) {
                Some(e) => r.add_scaled(e, c),
                None => r.add_term(*v, c),
            }
        }
        r
    }

    /// Value under a total assignment of its variables; `None` if one is missing.
    pub fn eval(&self, env: &impl Fn(&Var) -> Option<Rational>) -> Option<Rational> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.terms {
            acc += c * env(v)?;
        }
        Some(acc)
    }

    /// Occurrence count: one per variable, one more for a coefficient other
    /// than ±1, one for a nonzero constant.
    pub fn measure(&self) -> usize {
        let terms: usize = self
            .terms
            .values()
            .map(|c| if c.abs().is_one() { 1 } else { 2 })
            .sum();
        let k = usize::from(!self.constant.is_zero());
        if terms == 0 {
            1
        } else {
            terms + k
        }
    }

    pub fn display<'a>(&'a self, names: &'a Names) -> LinDisplay<'a> {
        LinDisplay { e: self, names }
    }
}

pub struct LinDisplay<'a> {
    e: &'a LinExpr,
    names: &'a Names,
}

impl fmt::Display for LinDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if !self.e.constant.is_zero() || self.e.terms.is_empty() {
            write!(f, "{}", fmt_exact(&self.e.constant))?;
            first = false;
        }
        for (v, c) in &self.e.terms {
            let neg = c.is_negative();
            let mag = c.abs();
            let var = self.names.var(v);
            match (first, neg) {
                (true, false) => {}
                (true, true) => f.write_str("-")?,
                (false, false) => f.write_str(" + ")?,
                (false, true) => f.write_str(" - ")?,
            }
            if mag.is_one() {
                write!(f, "{var}")?;
            } else {
                write!(f, "{}*{var}", fmt_exact(&mag))?;
            }
            first = false;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }

    /// Operator after multiplying both sides by a negative number.
    pub fn mirrored(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Eq => CmpOp::Eq,
            CmpOp::Ge => CmpOp::Le,
            CmpOp::Gt => CmpOp::Lt,
        }
    }

    /// Logical negation; `None` for `Eq`.
    pub fn negated(self) -> Option<CmpOp> {
        match self {
            CmpOp::Lt => Some(CmpOp::Ge),
            CmpOp::Le => Some(CmpOp::Gt),
            CmpOp::Eq => None,
            CmpOp::Ge => Some(CmpOp::Lt),
            CmpOp::Gt => Some(CmpOp::Le),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }
}

/// `Σ coeff·var  op  rhs`, scaled so the pivot (largest stream variable, else largest variable) has coefficient 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinAtom {
    pub lhs: BTreeMap<Var, Rational>,
    pub op: CmpOp,
    pub rhs: Rational,
}

/// Result of building a comparison: either a canonical atom or a ground truth value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AtomOrConst {
    Atom(LinAtom),
    Const(bool),
}

impl LinAtom {
    /// Canonical form of `lhs op rhs`: the largest stream variable (or, failing that,
    /// the largest variable) gets coefficient 1.
    pub fn build(lhs: &LinExpr, op: CmpOp, rhs: &LinExpr) -> AtomOrConst {
        let diff = lhs.minus(rhs);
        let bound = -diff.constant.clone();
        let Some(lead) = diff
            .terms
            .iter()
            .rev()
            .find(|(v, _)| !v.is_fresh())
            .or_else(|| diff.terms.iter().next_back())
            .map(|(_, c)| c.clone())
        else {
            return AtomOrConst::Const(op.holds(&Rational::zero(), &bound));
        };
        let op = if lead.is_negative() {
            op.mirrored()
        } else {
            op
        };
        let inv = lead.recip();
        AtomOrConst::Atom(LinAtom {
            lhs: diff.terms.iter().map(|(v, c)| (*v, c * &inv)).collect(),
            op,
            rhs: bound * inv,
        })
    }

    pub fn lhs_expr(&self) -> LinExpr {
        LinExpr {
            constant: Rational::zero(),
            terms: self.lhs.clone(),
        }
    }

    /// The atom with its operator replaced by the logical negation; `None` for `Eq`.
    pub fn negated(&self) -> Option<LinAtom> {
        self.op.negated().map(|op| LinAtom { op, ..self.clone() })
    }

    pub fn with_op(&self, op: CmpOp) -> LinAtom {
        LinAtom { op, ..self.clone() }
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.lhs.keys()
    }

    pub fn substitute(&self, map: &HashMap<Var, LinExpr>) -> AtomOrConst {
        if !self.lhs.keys().any(|v| map.contains_key(v)) {
            return AtomOrConst::Atom(self.clone());
        }
        let lhs = self.lhs_expr().substitute(map);
        LinAtom::build(&lhs, self.op, &LinExpr::constant(self.rhs.clone()))
    }

    pub fn eval(&self, env: &impl Fn(&Var) -> Option<Rational>) -> Option<bool> {
        Some(self.op.holds(&self.lhs_expr().eval(env)?, &self.rhs))
    }

    pub fn measure(&self) -> usize {
        let terms: usize = self
            .lhs
            .values()
            .map(|c| if c.abs().is_one() { 1 } else { 2 })
            .sum();
        terms + usize::from(!self.rhs.is_zero())
    }

    /// Largest stream variable, or the largest variable if there is none.
    pub fn print_pivot(&self) -> Var {
        *self
            .lhs
            .keys()
            .rev()
            .find(|v| !v.is_fresh())
            .unwrap_or_else(|| self.lhs.keys().next_back().expect("atom without variables"))
    }

    pub fn var_set(&self) -> BTreeSet<Var> {
        self.lhs.keys().copied().collect()
    }

    pub fn display<'a>(&'a self, names: &'a Names) -> AtomDisplay<'a> {
        AtomDisplay { a: self, names }
    }
}

pub struct AtomDisplay<'a> {
    a: &'a LinAtom,
    names: &'a Names,
}

impl fmt::Display for AtomDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.a;
        if a.op == CmpOp::Eq {
            let p = a.print_pivot();
            let cp = a.lhs[&p].clone();
            // p = (rhs - Σ_{v≠p} c·v) / cp
            let mut rest = LinExpr::constant(a.rhs.clone() / &cp);
            for (v, c) in &a.lhs {
                if *v != p {
                    rest.add_term(*v, &(-c / &cp));
                }
            }
            return write!(f, "{} = {}", self.names.var(&p), rest.display(self.names));
        }
        let lhs = a.lhs_expr();
        write!(
            f,
            "{} {} {}",
            lhs.display(self.names),
            a.op.symbol(),
            fmt_exact(&a.rhs)
        )
    }
}
