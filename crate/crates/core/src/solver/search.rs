//! Case-splitting search over Boolean structure with linear feasibility at each node.

use super::linear::{self, Bounds, Constraint};
use super::{Caps, SolverError};
use crate::spec::Sort;
use crate::symbolic::{CmpOp, LinAtom, LinExpr, Subst, SymExpr, Var};
use std::collections::{BTreeSet, HashMap};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Sat,
    Bounds,
}

struct Search<'a> {
    caps: &'a Caps,
    mode: Mode,
    protect: Option<Var>,
    nodes: usize,
    leaves: usize,
    leaf_overflow: bool,
    hull: Bounds,
}

/// Splits conjunctions, drops `tt`; `None` on `ff`.
fn flatten(cs: impl IntoIterator<Item = SymExpr>) -> Option<Vec<SymExpr>> {
    let mut out = Vec::new();
    let mut stack: Vec<SymExpr> = cs.into_iter().collect();
    while let Some(c) = stack.pop() {
        match c {
            SymExpr::Const(true) => {}
            SymExpr::Const(false) => return None,
            SymExpr::And(xs) => stack.extend(xs),
            other => out.push(other),
        }
    }
    out.sort();
    out.dedup();
    Some(out)
}

fn apply_all(cs: Vec<SymExpr>, s: &Subst) -> Option<Vec<SymExpr>> {
    flatten(cs.into_iter().map(|c| c.apply(s)))
}

fn count_occurrences(e: &SymExpr, occ: &mut HashMap<Var, usize>) {
    match e {
        SymExpr::Const(_) => {}
        SymExpr::Var(v) => *occ.entry(*v).or_default() += 1,
        SymExpr::Atom(a) => {
            for v in a.vars() {
                *occ.entry(*v).or_default() += 1;
            }
        }
        SymExpr::Not(a) => count_occurrences(a, occ),
        SymExpr::And(xs) | SymExpr::Or(xs) => xs.iter().for_each(|x| count_occurrences(x, occ)),
        SymExpr::Xor(a, b) | SymExpr::Iff(a, b) => {
            count_occurrences(a, occ);
            count_occurrences(b, occ);
        }
        SymExpr::Ite(c, t, f) => {
            count_occurrences(c, occ);
            count_occurrences(t, occ);
            count_occurrences(f, occ);
        }
    }
}

/// Variables occurring exactly once, which can therefore be chosen freely.
struct Private<'a> {
    occ: &'a HashMap<Var, usize>,
    protect: Option<Var>,
}

impl Private<'_> {
    fn is_private(&self, v: &Var) -> bool {
        Some(*v) != self.protect && self.occ.get(v) == Some(&1)
    }

    /// Both truth values are reachable by choosing private variables.
    fn free(&self, e: &SymExpr) -> bool {
        match e {
            SymExpr::Var(v) => self.is_private(v),
            SymExpr::Atom(a) => a.vars().any(|v| self.is_private(v)),
            SymExpr::Not(x) => self.free(x),
            SymExpr::Xor(a, b) | SymExpr::Iff(a, b) => self.free(a) || self.free(b),
            SymExpr::Ite(_, t, f) => self.free(t) && self.free(f),
            _ => false,
        }
    }

    fn can_true(&self, e: &SymExpr) -> bool {
        self.free(e)
            || match e {
                SymExpr::Const(b) => *b,
                SymExpr::Or(xs) => xs.iter().any(|x| self.can_true(x)),
                SymExpr::And(xs) => xs.iter().all(|x| self.can_true(x)),
                SymExpr::Not(x) => self.can_false(x),
                _ => false,
            }
    }

    fn can_false(&self, e: &SymExpr) -> bool {
        self.free(e)
            || match e {
                SymExpr::Const(b) => !*b,
                SymExpr::And(xs) => xs.iter().any(|x| self.can_false(x)),
                SymExpr::Or(xs) => xs.iter().all(|x| self.can_false(x)),
                SymExpr::Not(x) => self.can_true(x),
                _ => false,
            }
    }
}

/// Solves the canonical equality `a` for `p`.
fn solve_for(a: &LinAtom, p: Var) -> LinExpr {
    let cp = a.lhs[&p].clone();
    let mut e = LinExpr::constant(&a.rhs / &cp);
    for (v, c) in &a.lhs {
        if *v != p {
            e.add_term(*v, &(-(c / &cp)));
        }
    }
    e
}

/// Groups constraints that are linked through shared variables.
fn components(cs: Vec<SymExpr>) -> Vec<(BTreeSet<Var>, Vec<SymExpr>)> {
    let mut parent: Vec<usize> = (0..cs.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut owner: HashMap<Var, usize> = HashMap::new();
    let vars: Vec<BTreeSet<Var>> = cs.iter().map(SymExpr::vars).collect();
    for (i, vs) in vars.iter().enumerate() {
        for v in vs {
            let j = *owner.entry(*v).or_insert(i);
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            parent[a] = b;
        }
    }
    let mut groups: HashMap<usize, (BTreeSet<Var>, Vec<SymExpr>)> = HashMap::new();
    for (i, (c, vs)) in cs.into_iter().zip(vars).enumerate() {
        let g = groups.entry(find(&mut parent, i)).or_default();
        g.0.extend(vs);
        g.1.push(c);
    }
    let mut out: Vec<_> = groups.into_values().collect();
    out.sort_by_key(|g| g.1.len());
    out
}

fn is_literal(e: &SymExpr) -> bool {
    match e {
        SymExpr::Atom(_) => true,
        SymExpr::Not(x) => matches!(&**x, SymExpr::Atom(a) if a.op == CmpOp::Eq),
        _ => false,
    }
}

impl Search<'_> {
    fn new(caps: &Caps, mode: Mode, protect: Option<Var>) -> Search<'_> {
        Search {
            caps,
            mode,
            protect,
            nodes: 0,
            leaves: 0,
            leaf_overflow: false,
            hull: Bounds::Empty,
        }
    }

    fn propagate(&self, cs: Vec<SymExpr>) -> Option<Vec<SymExpr>> {
        let mut cs = flatten(cs)?;
        loop {
            let mut s = Subst::new();
            for c in &cs {
                let (v, val) = match c {
                    SymExpr::Var(v) => (*v, true),
                    SymExpr::Not(x) => match &**x {
                        SymExpr::Var(v) => (*v, false),
                        _ => continue,
                    },
                    _ => continue,
                };
                match s.bools.get(&v) {
                    Some(SymExpr::Const(b)) if *b != val => return None,
                    _ => {
                        s.bools.insert(v, SymExpr::Const(val));
                    }
                }
            }
            if !s.is_empty() {
                cs = apply_all(cs, &s)?;
                continue;
            }

            let eq = cs.iter().enumerate().find_map(|(i, c)| match c {
                SymExpr::Atom(a) if a.op == CmpOp::Eq => a
                    .lhs
                    .keys()
                    .rev()
                    .find(|v| Some(**v) != self.protect)
                    .map(|p| (i, solve_for(a, *p), *p)),
                _ => None,
            });
            if let Some((i, e, p)) = eq {
                cs.swap_remove(i);
                s.reals.insert(p, e);
                cs = apply_all(cs, &s)?;
                continue;
            }

            let mut occ = HashMap::new();
            for c in &cs {
                count_occurrences(c, &mut occ);
            }
            let private = Private {
                occ: &occ,
                protect: self.protect,
            };
            let before = cs.len();
            cs.retain(|c| !private.can_true(c));
            if cs.len() != before {
                continue;
            }

            // inline Boolean definitions whose variable has exactly one other use
            let mut chosen: BTreeSet<Var> = BTreeSet::new();
            let mut rhs_vars: BTreeSet<Var> = BTreeSet::new();
            let mut defs = Vec::new();
            for (i, c) in cs.iter().enumerate() {
                let SymExpr::Iff(a, b) = c else { continue };
                let (v, rhs) = match (&**a, &**b) {
                    (SymExpr::Var(v), r) | (r, SymExpr::Var(v)) if occ.get(v) == Some(&2) => {
                        (*v, r)
                    }
                    _ => continue,
                };
                let rv = rhs.vars();
                if chosen.contains(&v)
                    || rv.contains(&v)
                    || rhs_vars.contains(&v)
                    || rv.iter().any(|x| chosen.contains(x))
                {
                    continue;
                }
                chosen.insert(v);
                rhs_vars.extend(rv);
                s.bools.insert(v, rhs.clone());
                defs.push(i);
            }
            if defs.is_empty() {
                break;
            }
            for i in defs.into_iter().rev() {
                cs.swap_remove(i);
            }
            cs = apply_all(cs, &s)?;
        }
        Some(cs)
    }

    /// Returns `true` when the search can stop (a model was found in `Sat` mode).
    fn node(&mut self, cs: Vec<SymExpr>) -> Result<bool, SolverError> {
        self.nodes += 1;
        if self.nodes > self.caps.nodes {
            return Err(SolverError::ResourceExceeded(format!(
                "search exceeded {} nodes",
                self.caps.nodes
            )));
        }
        let Some(cs) = self.propagate(cs) else {
            return Ok(false);
        };
        if cs.len() > 1 {
            let mut parts = components(cs.clone());
            if parts.len() > 1 {
                return self.split(&mut parts);
            }
        }
        let (lits, rest): (Vec<SymExpr>, Vec<SymExpr>) = cs.iter().cloned().partition(is_literal);
        let mut ineqs = Vec::new();
        let mut diseqs = Vec::new();
        for l in &lits {
            match l {
                SymExpr::Atom(a) => ineqs.push(Constraint::from_atom(a)),
                SymExpr::Not(x) => match &**x {
                    SymExpr::Atom(a) => diseqs.push(a.clone()),
                    _ => unreachable!(),
                },
                _ => unreachable!(),
            }
        }
        if rest.is_empty() {
            return self.leaf(ineqs, diseqs);
        }
        match (self.mode, self.protect) {
            (Mode::Bounds, Some(v)) => {
                // every leaf below lies within the range under the literals alone
                let relaxed = linear::bounds(ineqs, v, self.caps.fm_constraints)?;
                if relaxed == Bounds::Empty || self.hull.hull(&relaxed) == self.hull {
                    return Ok(false);
                }
            }
            _ => {
                if !ineqs.is_empty() && !linear::feasible(ineqs, self.caps.fm_constraints)? {
                    return Ok(false);
                }
            }
        }

        let mut vars = BTreeSet::new();
        for r in &rest {
            r.collect_vars(&mut vars);
        }
        if let Some(v) = vars.iter().rev().find(|v| v.sort == Sort::Bool).copied() {
            for val in [true, false] {
                let mut s = Subst::new();
                s.bools.insert(v, SymExpr::Const(val));
                if let Some(next) = apply_all(cs.clone(), &s) {
                    if self.node(next)? {
                        return Ok(true);
                    }
                }
            }
            return Ok(false);
        }
        let mut atoms = Vec::new();
        rest[0].collect_atoms(&mut atoms);
        let atom = atoms
            .into_iter()
            .next()
            .expect("non-literal constraint without atoms");
        for val in [true, false] {
            let mut s = Subst::new();
            s.set_atom(&atom, val);
            let lit = if val {
                SymExpr::Atom(atom.clone())
            } else {
                crate::symbolic::expr::mk_not(SymExpr::Atom(atom.clone()))
            };
            if let Some(mut next) = apply_all(cs.clone(), &s) {
                next.push(lit);
                if self.node(next)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// Solves independent parts one at a time. In `Bounds` mode the part holding the target
    /// is searched last, and only if every other part is satisfiable.
    fn split(
        &mut self,
        parts: &mut Vec<(BTreeSet<Var>, Vec<SymExpr>)>,
    ) -> Result<bool, SolverError> {
        let target = match (self.mode, self.protect) {
            (Mode::Bounds, Some(v)) => {
                let i = parts.iter().position(|p| p.0.contains(&v));
                Some(i.map_or_else(Vec::new, |i| parts.swap_remove(i).1))
            }
            _ => None,
        };
        let (mode, protect) = (self.mode, self.protect);
        self.mode = Mode::Sat;
        self.protect = None;
        let mut all_sat = Ok(true);
        for (_, part) in parts.drain(..) {
            all_sat = self.node(part);
            if !matches!(all_sat, Ok(true)) {
                break;
            }
        }
        self.mode = mode;
        self.protect = protect;
        match target {
            _ if !all_sat? => Ok(false),
            Some(part) => self.node(part),
            None => Ok(true),
        }
    }

    fn leaf(
        &mut self,
        ineqs: Vec<Constraint>,
        mut diseqs: Vec<LinAtom>,
    ) -> Result<bool, SolverError> {
        if let Some(d) = diseqs.pop() {
            for op in [CmpOp::Lt, CmpOp::Gt] {
                let mut next = ineqs.clone();
                next.push(Constraint::from_atom(&d.with_op(op)));
                if self.leaf(next, diseqs.clone())? {
                    return Ok(true);
                }
            }
            return Ok(false);
        }
        match self.mode {
            Mode::Sat => linear::feasible(ineqs, self.caps.fm_constraints),
            Mode::Bounds => {
                let v = self.protect.expect("bounds search without target");
                let b = linear::bounds(ineqs, v, self.caps.fm_constraints)?;
                if b != Bounds::Empty {
                    self.leaves += 1;
                    if self.leaves > self.caps.leaves {
                        self.leaf_overflow = true;
                        return Err(SolverError::ResourceExceeded("too many leaves".into()));
                    }
                    self.hull = self.hull.hull(&b);
                }
                Ok(false)
            }
        }
    }
}

pub fn is_sat(cs: &[SymExpr], caps: &Caps) -> Result<bool, SolverError> {
    Search::new(caps, Mode::Sat, None).node(cs.iter().map(SymExpr::simplify).collect())
}

/// Range of the Real variable `v` over all models of `cs`.
///
/// When the case split produces more than `caps.leaves` feasible leaves the result
/// falls back to the range under the top-level linear literals alone, which is a
/// sound over-approximation.
pub fn bounds_of(cs: &[SymExpr], v: Var, caps: &Caps) -> Result<Bounds, SolverError> {
    let mut s = Search::new(caps, Mode::Bounds, Some(v));
    match s.node(cs.iter().map(SymExpr::simplify).collect()) {
        Ok(_) => Ok(s.hull),
        Err(_) if s.leaf_overflow => {
            log::debug!("bounds_of: leaf limit reached, weakening to conjunctive part");
            let Some(flat) = flatten(cs.iter().map(SymExpr::simplify)) else {
                return Ok(Bounds::Empty);
            };
            let ineqs = flat
                .iter()
                .filter_map(|c| match c {
                    SymExpr::Atom(a) => Some(Constraint::from_atom(a)),
                    _ => None,
                })
                .collect();
            linear::bounds(ineqs, v, caps.fm_constraints)
        }
        Err(e) => Err(e),
    }
}

/// Linear literals at the top level of `cs`; `None` if `cs` simplifies to `ff`.
pub fn conjunctive_part(cs: &[SymExpr]) -> Option<Vec<LinAtom>> {
    Some(
        flatten(cs.iter().map(SymExpr::simplify))?
            .into_iter()
            .filter_map(|c| match c {
                SymExpr::Atom(a) => Some(a),
                _ => None,
            })
            .collect(),
    )
}
