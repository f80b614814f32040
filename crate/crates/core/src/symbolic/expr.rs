//! Bool-sorted symbolic expressions, simplification, substitution and size.

use super::lin::{AtomOrConst, LinAtom, LinExpr};
use super::var::{Names, Var};
use crate::rational::Rational;
use crate::spec::Sort;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymExpr {
    Const(bool),
    /// A Bool-sorted variable.
    Var(Var),
    Atom(LinAtom),
    Not(Box<SymExpr>),
    And(Vec<SymExpr>),
    Or(Vec<SymExpr>),
    Xor(Box<SymExpr>, Box<SymExpr>),
    Iff(Box<SymExpr>, Box<SymExpr>),
    Ite(Box<SymExpr>, Box<SymExpr>, Box<SymExpr>),
}

/// A value bound to a variable by substitution.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Bool(SymExpr),
    Real(LinExpr),
}

impl Term {
    pub fn sort(&self) -> Sort {
        match self {
            Term::Bool(_) => Sort::Bool,
            Term::Real(_) => Sort::Real,
        }
    }
}

fn from_atom(a: AtomOrConst) -> SymExpr {
    match a {
        AtomOrConst::Atom(a) => SymExpr::Atom(a),
        AtomOrConst::Const(b) => SymExpr::Const(b),
    }
}

/// Simultaneous substitution of Bool variables, Real variables and whole atoms.
#[derive(Debug, Clone, Default)]
pub struct Subst {
    pub bools: HashMap<Var, SymExpr>,
    pub reals: HashMap<Var, LinExpr>,
    pub atoms: HashMap<LinAtom, bool>,
}

impl Subst {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(binding: &HashMap<Var, Term>) -> Self {
        let mut s = Subst::new();
        for (v, t) in binding {
            match t {
                Term::Bool(e) => {
                    s.bools.insert(*v, e.clone());
                }
                Term::Real(e) => {
                    s.reals.insert(*v, e.clone());
                }
            }
        }
        s
    }

    /// Fixes the truth value of `atom` (and of its negation, for inequalities).
    pub fn set_atom(&mut self, atom: &LinAtom, value: bool) {
        if let Some(n) = atom.negated() {
            self.atoms.insert(n, !value);
        }
        self.atoms.insert(atom.clone(), value);
    }

    pub fn is_empty(&self) -> bool {
        self.bools.is_empty() && self.reals.is_empty() && self.atoms.is_empty()
    }
}

impl SymExpr {
    pub fn tt() -> Self {
        SymExpr::Const(true)
    }

    pub fn ff() -> Self {
        SymExpr::Const(false)
    }

    pub fn var(v: Var) -> Self {
        SymExpr::Var(v)
    }

    pub fn not(e: SymExpr) -> Self {
        SymExpr::Not(Box::new(e))
    }

    pub fn and(es: Vec<SymExpr>) -> Self {
        SymExpr::And(es)
    }

    pub fn or(es: Vec<SymExpr>) -> Self {
        SymExpr::Or(es)
    }

    pub fn xor(a: SymExpr, b: SymExpr) -> Self {
        SymExpr::Xor(Box::new(a), Box::new(b))
    }

    pub fn iff(a: SymExpr, b: SymExpr) -> Self {
        SymExpr::Iff(Box::new(a), Box::new(b))
    }

    pub fn ite(c: SymExpr, t: SymExpr, e: SymExpr) -> Self {
        SymExpr::Ite(Box::new(c), Box::new(t), Box::new(e))
    }

    pub fn implies(a: SymExpr, b: SymExpr) -> Self {
        SymExpr::Or(vec![SymExpr::not(a), b])
    }

    /// Canonical comparison atom, folded to a constant when ground.
    pub fn cmp(lhs: &LinExpr, op: super::lin::CmpOp, rhs: &LinExpr) -> Self {
        from_atom(LinAtom::build(lhs, op, rhs))
    }

    /// Equality between two terms of the same sort.
    pub fn term_eq(a: &Term, b: &Term) -> Self {
        match (a, b) {
            (Term::Bool(x), Term::Bool(y)) => SymExpr::iff(x.clone(), y.clone()),
            (Term::Real(x), Term::Real(y)) => SymExpr::cmp(x, super::lin::CmpOp::Eq, y),
            _ => panic!("sort mismatch in equation"),
        }
    }

    pub fn as_const(&self) -> Option<bool> {
        match self {
            SymExpr::Const(b) => Some(*b),
            _ => None,
        }
    }

    pub fn simplify(&self) -> SymExpr {
        self.apply(&Subst::new())
    }

    pub fn substitute(&self, binding: &HashMap<Var, Term>) -> SymExpr {
        self.apply(&Subst::from_terms(binding))
    }

    /// Applies `s` bottom-up and simplifies the result.
    pub fn apply(&self, s: &Subst) -> SymExpr {
        match self {
            SymExpr::Const(_) => self.clone(),
            SymExpr::Var(v) => match s.bools.get(v) {
                Some(e) => e.simplify(),
                None => self.clone(),
            },
            SymExpr::Atom(a) => {
                let e = if s.reals.is_empty() {
                    self.clone()
                } else {
                    from_atom(a.substitute(&s.reals))
                };
                match &e {
                    SymExpr::Atom(a2) => match s.atoms.get(a2) {
                        Some(b) => SymExpr::Const(*b),
                        None => e,
                    },
                    _ => e,
                }
            }
            SymExpr::Not(a) => mk_not(a.apply(s)),
            SymExpr::And(xs) => mk_and(xs.iter().map(|x| x.apply(s)).collect()),
            SymExpr::Or(xs) => mk_or(xs.iter().map(|x| x.apply(s)).collect()),
            SymExpr::Xor(a, b) => mk_xor(a.apply(s), b.apply(s)),
            SymExpr::Iff(a, b) => mk_iff(a.apply(s), b.apply(s)),
            SymExpr::Ite(c, t, e) => mk_ite(c.apply(s), t.apply(s), e.apply(s)),
        }
    }

    /// Number of variable and constant occurrences.
    pub fn measure(&self) -> usize {
        match self {
            SymExpr::Const(_) | SymExpr::Var(_) => 1,
            SymExpr::Atom(a) => a.measure(),
            SymExpr::Not(a) => a.measure(),
            SymExpr::And(xs) | SymExpr::Or(xs) => xs.iter().map(SymExpr::measure).sum(),
            SymExpr::Xor(a, b) | SymExpr::Iff(a, b) => a.measure() + b.measure(),
            SymExpr::Ite(c, t, e) => c.measure() + t.measure() + e.measure(),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            SymExpr::Const(_) => {}
            SymExpr::Var(v) => {
                out.insert(*v);
            }
            SymExpr::Atom(a) => out.extend(a.vars().copied()),
            SymExpr::Not(a) => a.collect_vars(out),
            SymExpr::And(xs) | SymExpr::Or(xs) => xs.iter().for_each(|x| x.collect_vars(out)),
            SymExpr::Xor(a, b) | SymExpr::Iff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            SymExpr::Ite(c, t, e) => {
                c.collect_vars(out);
                t.collect_vars(out);
                e.collect_vars(out);
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut s = BTreeSet::new();
        self.collect_vars(&mut s);
        s
    }

    /// Every distinct atom, in order of first occurrence.
    pub fn collect_atoms(&self, out: &mut Vec<LinAtom>) {
        match self {
            SymExpr::Const(_) | SymExpr::Var(_) => {}
            SymExpr::Atom(a) => {
                if !out.contains(a) {
                    out.push(a.clone());
                }
            }
            SymExpr::Not(a) => a.collect_atoms(out),
            SymExpr::And(xs) | SymExpr::Or(xs) => xs.iter().for_each(|x| x.collect_atoms(out)),
            SymExpr::Xor(a, b) | SymExpr::Iff(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            SymExpr::Ite(c, t, e) => {
                c.collect_atoms(out);
                t.collect_atoms(out);
                e.collect_atoms(out);
            }
        }
    }

    /// Truth value under a total assignment; `None` if a variable is missing.
    pub fn eval(
        &self,
        bools: &impl Fn(&Var) -> Option<bool>,
        reals: &impl Fn(&Var) -> Option<Rational>,
    ) -> Option<bool> {
        Some(match self {
            SymExpr::Const(b) => *b,
            SymExpr::Var(v) => bools(v)?,
            SymExpr::Atom(a) => a.eval(reals)?,
            SymExpr::Not(a) => !a.eval(bools, reals)?,
            SymExpr::And(xs) => {
                let mut r = true;
                for x in xs {
                    r &= x.eval(bools, reals)?;
                }
                r
            }
            SymExpr::Or(xs) => {
                let mut r = false;
                for x in xs {
                    r |= x.eval(bools, reals)?;
                }
                r
            }
            SymExpr::Xor(a, b) => a.eval(bools, reals)? ^ b.eval(bools, reals)?,
            SymExpr::Iff(a, b) => a.eval(bools, reals)? == b.eval(bools, reals)?,
            SymExpr::Ite(c, t, e) => {
                if c.eval(bools, reals)? {
                    t.eval(bools, reals)?
                } else {
                    e.eval(bools, reals)?
                }
            }
        })
    }

    pub fn display<'a>(&'a self, names: &'a Names) -> ExprDisplay<'a> {
        ExprDisplay { e: self, names }
    }
}

/// Cheap syntactic negation used for complement detection.
pub fn complement(e: &SymExpr) -> SymExpr {
    match e {
        SymExpr::Const(b) => SymExpr::Const(!b),
        SymExpr::Not(x) => (**x).clone(),
        SymExpr::Atom(a) => match a.negated() {
            Some(n) => SymExpr::Atom(n),
            None => SymExpr::not(e.clone()),
        },
        _ => SymExpr::not(e.clone()),
    }
}

/// Negation of a simplified expression.
pub fn mk_not(a: SymExpr) -> SymExpr {
    match a {
        SymExpr::Const(b) => SymExpr::Const(!b),
        SymExpr::Not(x) => *x,
        SymExpr::Atom(ref at) => match at.negated() {
            Some(n) => SymExpr::Atom(n),
            None => SymExpr::not(a),
        },
        other => SymExpr::not(other),
    }
}

fn mk_junction(children: Vec<SymExpr>, conj: bool) -> SymExpr {
    let unit = conj;
    let mut flat = Vec::with_capacity(children.len());
    for c in children {
        match c {
            SymExpr::Const(b) if b == unit => {}
            SymExpr::Const(_) => return SymExpr::Const(!unit),
            SymExpr::And(ys) if conj => flat.extend(ys),
            SymExpr::Or(ys) if !conj => flat.extend(ys),
            other => flat.push(other),
        }
    }
    flat.sort();
    flat.dedup();
    let set: BTreeSet<&SymExpr> = flat.iter().collect();
    if flat.iter().any(|c| set.contains(&complement(c))) {
        return SymExpr::Const(!unit);
    }
    // absorption: a ∧ (a ∨ b) = a, a ∨ (a ∧ b) = a
    let absorbed: Vec<bool> = flat
        .iter()
        .map(|c| match c {
            SymExpr::Or(ds) if conj => ds.iter().any(|d| set.contains(d)),
            SymExpr::And(ds) if !conj => ds.iter().any(|d| set.contains(d)),
            _ => false,
        })
        .collect();
    drop(set);
    let mut flat: Vec<SymExpr> = flat
        .into_iter()
        .zip(absorbed)
        .filter(|(_, a)| !a)
        .map(|(c, _)| c)
        .collect();
    match flat.len() {
        0 => SymExpr::Const(unit),
        1 => flat.pop().unwrap(),
        _ if conj => SymExpr::And(flat),
        _ => SymExpr::Or(flat),
    }
}

pub fn mk_and(children: Vec<SymExpr>) -> SymExpr {
    mk_junction(children, true)
}

pub fn mk_or(children: Vec<SymExpr>) -> SymExpr {
    mk_junction(children, false)
}

fn collect_xor(e: SymExpr, ops: &mut Vec<SymExpr>, parity: &mut bool) {
    match e {
        SymExpr::Const(b) => *parity ^= b,
        SymExpr::Not(x) => {
            *parity ^= true;
            collect_xor(*x, ops, parity);
        }
        SymExpr::Xor(a, b) => {
            collect_xor(*a, ops, parity);
            collect_xor(*b, ops, parity);
        }
        SymExpr::Iff(a, b) => {
            *parity ^= true;
            collect_xor(*a, ops, parity);
            collect_xor(*b, ops, parity);
        }
        other => ops.push(other),
    }
}

pub fn mk_xor(a: SymExpr, b: SymExpr) -> SymExpr {
    let mut ops = Vec::new();
    let mut parity = false;
    collect_xor(a, &mut ops, &mut parity);
    collect_xor(b, &mut ops, &mut parity);
    ops.sort();
    let mut kept: Vec<SymExpr> = Vec::with_capacity(ops.len());
    for o in ops {
        if kept.last() == Some(&o) {
            kept.pop();
        } else {
            kept.push(o);
        }
    }
    let mut it = kept.into_iter();
    let Some(first) = it.next() else {
        return SymExpr::Const(parity);
    };
    let chain = it.fold(first, SymExpr::xor);
    if parity {
        mk_not(chain)
    } else {
        chain
    }
}

pub fn mk_iff(a: SymExpr, b: SymExpr) -> SymExpr {
    match (a, b) {
        (SymExpr::Const(true), x) | (x, SymExpr::Const(true)) => x,
        (SymExpr::Const(false), x) | (x, SymExpr::Const(false)) => mk_not(x),
        (a, b) if a == b => SymExpr::tt(),
        (a, b) if complement(&a) == b || complement(&b) == a => SymExpr::ff(),
        (a, b) if a <= b => SymExpr::iff(a, b),
        (a, b) => SymExpr::iff(b, a),
    }
}

pub fn mk_ite(c: SymExpr, t: SymExpr, e: SymExpr) -> SymExpr {
    match (c, t, e) {
        (SymExpr::Const(true), t, _) => t,
        (SymExpr::Const(false), _, e) => e,
        (_, t, e) if t == e => t,
        (c, SymExpr::Const(true), SymExpr::Const(false)) => c,
        (c, SymExpr::Const(false), SymExpr::Const(true)) => mk_not(c),
        (c, t, e) => SymExpr::ite(c, t, e),
    }
}

pub struct ExprDisplay<'a> {
    e: &'a SymExpr,
    names: &'a Names,
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.names;
        let join = |f: &mut fmt::Formatter<'_>, xs: &[SymExpr], sep: &str| -> fmt::Result {
            f.write_str("(")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                write!(f, "{}", x.display(n))?;
            }
            f.write_str(")")
        };
        match self.e {
            SymExpr::Const(true) => f.write_str("tt"),
            SymExpr::Const(false) => f.write_str("ff"),
            SymExpr::Var(v) => write!(f, "{}", n.var(v)),
            SymExpr::Atom(a) => write!(f, "{}", a.display(n)),
            SymExpr::Not(a) => match **a {
                SymExpr::Var(_) => write!(f, "!{}", a.display(n)),
                _ => write!(f, "!({})", a.display(n)),
            },
            SymExpr::And(xs) => join(f, xs, " && "),
            SymExpr::Or(xs) => join(f, xs, " || "),
            SymExpr::Xor(a, b) => write!(f, "({} ^ {})", a.display(n), b.display(n)),
            SymExpr::Iff(a, b) => write!(f, "({} <-> {})", a.display(n), b.display(n)),
            SymExpr::Ite(c, t, e) => write!(
                f,
                "ite({}, {}, {})",
                c.display(n),
                t.display(n),
                e.display(n)
            ),
        }
    }
}

/// A set of Bool constraints, kept simplified with top-level conjunctions split.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    items: BTreeSet<SymExpr>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Simplifies `e` and adds its conjuncts; `tt` adds nothing.
    pub fn insert(&mut self, e: SymExpr) {
        self.insert_simplified(e.simplify());
    }

    /// Adds an already simplified expression.
    pub fn insert_simplified(&mut self, e: SymExpr) {
        match e {
            SymExpr::Const(true) => {}
            SymExpr::And(xs) => {
                for x in xs {
                    self.items.insert(x);
                }
            }
            other => {
                self.items.insert(other);
            }
        }
    }

    /// Adds `e` without simplifying or splitting it.
    pub fn insert_raw(&mut self, e: SymExpr) {
        self.items.insert(e);
    }

    pub fn extend(&mut self, es: impl IntoIterator<Item = SymExpr>) {
        for e in es {
            self.insert(e);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &SymExpr> {
        self.items.iter()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, e: &SymExpr) -> bool {
        self.items.contains(e)
    }

    pub fn has_false(&self) -> bool {
        self.items.contains(&SymExpr::ff())
    }

    pub fn measure(&self) -> usize {
        self.items.iter().map(SymExpr::measure).sum()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut s = BTreeSet::new();
        for e in &self.items {
            e.collect_vars(&mut s);
        }
        s
    }

    pub fn to_vec(&self) -> Vec<SymExpr> {
        self.items.iter().cloned().collect()
    }

    /// Applies `s` to every constraint.
    pub fn apply(&self, s: &Subst) -> ConstraintSet {
        let mut out = ConstraintSet::new();
        for e in &self.items {
            out.insert_simplified(e.apply(s));
        }
        out
    }
}

impl FromIterator<SymExpr> for ConstraintSet {
    fn from_iter<I: IntoIterator<Item = SymExpr>>(iter: I) -> Self {
        let mut c = ConstraintSet::new();
        c.extend(iter);
        c
    }
}

impl IntoIterator for ConstraintSet {
    type Item = SymExpr;
    type IntoIter = std::collections::btree_set::IntoIter<SymExpr>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.into_iter()
    }
}
