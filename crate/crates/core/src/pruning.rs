//! Constant-size rewriting of a constraint set onto its relevant variables.
//!
//! Boolean and linear-equation sets are pruned perfectly (the projection onto the relevant
//! variables is unchanged). Mixed sets are pruned soundly: the projection may grow.

use crate::rational::Rational;
use crate::solver::linear::{self, Constraint};
use crate::solver::{
    bounds_of, check_predicate, enumerate_bool_models, gaussian_solve, is_sat, rref, Bounds, Caps,
    GaussResult, LinearSystem, SolverError, Validity,
};
use crate::spec::Sort;
use crate::symbolic::expr::{mk_and, mk_not, mk_or};
use crate::symbolic::{CmpOp, ConstraintSet, FreshGen, LinAtom, LinExpr, Subst, SymExpr, Var};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quality {
    Perfect,
    Sound,
}

#[derive(Debug, Clone)]
pub struct PruneResult {
    pub constraints: ConstraintSet,
    pub fresh: Vec<Var>,
    pub quality: Quality,
    /// Each fresh Real variable as an affine form over the variables of the input set.
    pub witness: Vec<(Var, LinExpr)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PruneError {
    #[error("constraint outside the strategy's fragment: {0}")]
    Fragment(String),
    #[error("pruned set has measure {measure}, above the bound {bound}")]
    BoundExceeded { measure: usize, bound: usize },
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// `m·(c²+1)`, at least 1.
pub fn boolean_bound(m: usize, columns: usize) -> usize {
    (m * (columns * columns + 1)).max(1)
}

pub fn linear_bound(m: usize) -> usize {
    2 * m * m + 2 * m
}

/// Boolean and linear bounds plus 2 per box constraint.
pub fn mixed_bound(m_bool: usize, columns: usize, m_real: usize, box_constraints: usize) -> usize {
    boolean_bound(m_bool, columns) + linear_bound(m_real) + 2 * box_constraints
}

fn check_bound(cs: &ConstraintSet, bound: usize) -> Result<(), PruneError> {
    let measure = cs.measure();
    if measure > bound {
        return Err(PruneError::BoundExceeded { measure, bound });
    }
    Ok(())
}

fn single(e: SymExpr) -> ConstraintSet {
    let mut cs = ConstraintSet::new();
    cs.insert_raw(e);
    cs
}

fn ceil_log2(c: usize) -> usize {
    let mut k = 0;
    while (1usize << k) < c {
        k += 1;
    }
    k
}

/// Cubes over `bits` covering the codes in `lo..lo + 2^(k-d)` whose value is true.
fn cubes(
    value: &dyn Fn(usize) -> bool,
    bits: &[Var],
    d: usize,
    lo: usize,
    prefix: &mut Vec<SymExpr>,
    out: &mut Vec<SymExpr>,
) {
    let k = bits.len();
    let width = 1usize << (k - d);
    let vals: Vec<bool> = (lo..lo + width).map(value).collect();
    if vals.iter().all(|b| !b) {
        return;
    }
    if vals.iter().all(|b| *b) {
        out.push(mk_and(prefix.clone()));
        return;
    }
    let half = width / 2;
    prefix.push(mk_not(SymExpr::Var(bits[d])));
    cubes(value, bits, d + 1, lo, prefix, out);
    prefix.pop();
    prefix.push(SymExpr::Var(bits[d]));
    cubes(value, bits, d + 1, lo + half, prefix, out);
    prefix.pop();
}

fn boolean_table(
    cs: &[SymExpr],
    r: &[Var],
    fresh: &mut FreshGen,
    caps: &Caps,
) -> Result<(ConstraintSet, Vec<Var>, usize), PruneError> {
    let table = enumerate_bool_models(cs, r, caps)?;
    if table.is_empty() {
        return Ok((single(SymExpr::ff()), Vec::new(), 0));
    }
    if r.is_empty() {
        return Ok((ConstraintSet::new(), Vec::new(), 1));
    }
    let c = table.len();
    let k = ceil_log2(c);
    let bits: Vec<Var> = (0..k).map(|_| fresh.next(Sort::Bool)).collect();
    let mut out = ConstraintSet::new();
    for (i, ri) in r.iter().enumerate() {
        // codes past the last column reuse the last column
        let value = |code: usize| table[code.min(c - 1)][i];
        let mut parts = Vec::new();
        cubes(&value, &bits, 0, 0, &mut Vec::new(), &mut parts);
        match mk_or(parts) {
            SymExpr::Const(true) => out.insert_raw(SymExpr::Var(*ri)),
            SymExpr::Const(false) => out.insert_raw(mk_not(SymExpr::Var(*ri))),
            e => out.insert_raw(SymExpr::iff(SymExpr::Var(*ri), e)),
        }
    }
    Ok((out, bits, c))
}

/// Perfect pruning for Boolean constraint sets via the projection table of all models.
pub fn prune_boolean(
    cs: &ConstraintSet,
    r: &[Var],
    fresh: &mut FreshGen,
    caps: &Caps,
) -> Result<PruneResult, PruneError> {
    if let Some(v) = cs
        .vars()
        .into_iter()
        .chain(r.iter().copied())
        .find(|v| v.sort != Sort::Bool)
    {
        return Err(PruneError::Fragment(format!(
            "Real variable {v:?} in Boolean pruning"
        )));
    }
    let (constraints, bits, columns) = boolean_table(&cs.to_vec(), r, fresh, caps)?;
    check_bound(&constraints, boolean_bound(r.len(), columns))?;
    Ok(PruneResult {
        constraints,
        fresh: bits,
        quality: Quality::Perfect,
        witness: Vec::new(),
    })
}

/// Perfect pruning for conjunctions of linear equations.
///
/// The equations are row-reduced with the relevant variables first (largest first), so
/// every relevant variable is either a pivot expressed over the remaining free variables
/// or free itself. Remaining columns put stream variables before fresh ones, so earlier
/// fresh summaries stay free and become the sources. The resulting system `r = N·s + o` is
/// compressed to `r = N'·v + o` over `rank(N)` fresh variables `v = B·s`.
pub fn prune_linear(
    cs: &ConstraintSet,
    r: &[Var],
    fresh: &mut FreshGen,
) -> Result<PruneResult, PruneError> {
    let mut eqs = Vec::new();
    for c in cs.iter() {
        match c {
            SymExpr::Atom(a) if a.op == CmpOp::Eq => eqs.push(a),
            other => {
                return Err(PruneError::Fragment(format!(
                    "linear pruning needs equations, found {other:?}"
                )))
            }
        }
    }
    if let Some(v) = r.iter().find(|v| v.sort != Sort::Real) {
        return Err(PruneError::Fragment(format!(
            "Bool variable {v:?} in linear pruning"
        )));
    }
    let res = linear_core(&eqs, r, fresh)?;
    check_bound(&res.constraints, linear_bound(r.len()))?;
    Ok(res)
}

/// Factors `N = N'·B` with `N'` of full column rank `rank`.
///
/// When the nonzero columns of `N` point in exactly `rank` distinct directions, each
/// fresh variable sums the sources sharing one direction, which keeps independent groups
/// of sources apart. Otherwise `N'` is the reduced column echelon form of `N`, so the
/// fresh variables are offsets of a subset of the relevant variables themselves.
fn choose_basis(
    n: &[Vec<Rational>],
    cols: usize,
    rank: usize,
) -> (Vec<Vec<Rational>>, Vec<Vec<Rational>>) {
    let m = n.len();
    let mut dirs: Vec<Vec<Rational>> = Vec::new();
    let mut change: Vec<Vec<Rational>> = Vec::new();
    for c in 0..cols {
        let col: Vec<Rational> = n.iter().map(|row| row[c].clone()).collect();
        let Some(lead) = col.iter().rev().find(|x| !x.is_zero()).cloned() else {
            continue;
        };
        let dir: Vec<Rational> = col.iter().map(|x| x / &lead).collect();
        let g = match dirs.iter().position(|d| *d == dir) {
            Some(g) => g,
            None => {
                dirs.push(dir);
                change.push(vec![Rational::zero(); cols]);
                dirs.len() - 1
            }
        };
        change[g][c] = lead;
    }
    if dirs.len() == rank {
        let basis = (0..m)
            .map(|i| dirs.iter().map(|d| d[i].clone()).collect())
            .collect();
        return (basis, change);
    }
    let mut t: Vec<Vec<Rational>> = (0..cols)
        .map(|c| n.iter().map(|row| row[c].clone()).collect())
        .collect();
    let pivots = rref(&mut t, m);
    let basis = (0..m)
        .map(|i| (0..rank).map(|j| t[j][i].clone()).collect())
        .collect();
    let change = pivots.iter().map(|p| n[*p].clone()).collect();
    (basis, change)
}

fn linear_core(
    eqs: &[&LinAtom],
    r: &[Var],
    fresh: &mut FreshGen,
) -> Result<PruneResult, PruneError> {
    let mut rel: Vec<Var> = r.to_vec();
    rel.sort();
    rel.dedup();
    rel.reverse();
    let rel_set: BTreeSet<Var> = rel.iter().copied().collect();
    let others: BTreeSet<Var> = eqs
        .iter()
        .flat_map(|a| a.vars().copied())
        .filter(|v| !rel_set.contains(v))
        .collect();
    let cols: Vec<Var> = rel.iter().copied().chain(others.iter().copied()).collect();
    let index: HashMap<Var, usize> = cols.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let n = cols.len();
    let mut m: Vec<Vec<Rational>> = eqs
        .iter()
        .map(|a| {
            let mut row = vec![Rational::zero(); n + 1];
            for (v, c) in &a.lhs {
                row[index[v]] = c.clone();
            }
            row[n] = a.rhs.clone();
            row
        })
        .collect();
    let pivots = rref(&mut m, n);
    let inconsistent = m
        .iter()
        .any(|row| row[..n].iter().all(Zero::is_zero) && !row[n].is_zero());
    if inconsistent {
        return Ok(PruneResult {
            constraints: single(SymExpr::ff()),
            fresh: Vec::new(),
            quality: Quality::Perfect,
            witness: Vec::new(),
        });
    }
    let pivot_row: HashMap<usize, usize> = pivots
        .iter()
        .enumerate()
        .map(|(row, col)| (*col, row))
        .collect();
    let free_cols: Vec<usize> = (0..n).filter(|c| !pivot_row.contains_key(c)).collect();
    let free_pos: HashMap<usize, usize> =
        free_cols.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let mut matrix = Vec::with_capacity(rel.len());
    let mut offsets = Vec::with_capacity(rel.len());
    for (j, _) in rel.iter().enumerate() {
        let mut row = vec![Rational::zero(); free_cols.len()];
        match pivot_row.get(&j) {
            Some(&pr) => {
                for (fi, fc) in free_cols.iter().enumerate() {
                    row[fi] = -m[pr][*fc].clone();
                }
                offsets.push(m[pr][n].clone());
            }
            None => {
                row[free_pos[&j]] = Rational::one();
                offsets.push(Rational::zero());
            }
        }
        matrix.push(row);
    }
    let sys = LinearSystem {
        matrix,
        offsets,
        side_conditions: Vec::new(),
    };
    let GaussResult::Solved { rank, .. } = gaussian_solve(&sys) else {
        unreachable!("no side conditions given")
    };
    let (basis, change_of_basis) = choose_basis(&sys.matrix, free_cols.len(), rank);
    let vs: Vec<Var> = (0..rank).map(|_| fresh.next(Sort::Real)).collect();
    let mut constraints = ConstraintSet::new();
    for (i, ri) in rel.iter().enumerate() {
        let mut e = LinExpr::constant(sys.offsets[i].clone());
        for (j, v) in vs.iter().enumerate() {
            e.add_term(*v, &basis[i][j]);
        }
        constraints.insert(SymExpr::cmp(&LinExpr::var(*ri), CmpOp::Eq, &e));
    }
    let witness = vs
        .iter()
        .zip(&change_of_basis)
        .map(|(v, row)| {
            let mut e = LinExpr::default();
            for (fi, fc) in free_cols.iter().enumerate() {
                e.add_term(cols[*fc], &row[fi]);
            }
            (*v, e)
        })
        .collect();
    Ok(PruneResult {
        constraints,
        fresh: vs,
        quality: Quality::Perfect,
        witness,
    })
}

fn literal_constraints(lits: &[LinAtom]) -> Vec<Constraint> {
    lits.iter().map(Constraint::from_atom).collect()
}

/// Truth value of `a` implied by the conjunction `lits`, if any.
fn decided(lits: &[LinAtom], a: &LinAtom, caps: &Caps) -> Result<Option<bool>, SolverError> {
    let base = literal_constraints(lits);
    let refutable = |ops: &[CmpOp]| -> Result<bool, SolverError> {
        for op in ops {
            let mut q = base.clone();
            q.push(Constraint::from_atom(&a.with_op(*op)));
            if linear::feasible(q, caps.fm_constraints)? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let negation: Vec<CmpOp> = match a.op.negated() {
        Some(op) => vec![op],
        None => vec![CmpOp::Lt, CmpOp::Gt],
    };
    if refutable(&negation)? {
        return Ok(Some(true));
    }
    if refutable(&[a.op])? {
        return Ok(Some(false));
    }
    Ok(None)
}

fn abstract_atoms(e: &SymExpr, map: &mut BTreeMap<LinAtom, Var>, gen: &mut FreshGen) -> SymExpr {
    match e {
        SymExpr::Atom(a) => {
            if let Some(v) = map.get(a) {
                return SymExpr::Var(*v);
            }
            if let Some(v) = a.negated().and_then(|n| map.get(&n).copied()) {
                return mk_not(SymExpr::Var(v));
            }
            let v = gen.next(Sort::Bool);
            map.insert(a.clone(), v);
            SymExpr::Var(v)
        }
        SymExpr::Const(_) | SymExpr::Var(_) => e.clone(),
        SymExpr::Not(x) => SymExpr::not(abstract_atoms(x, map, gen)),
        SymExpr::And(xs) => SymExpr::and(xs.iter().map(|x| abstract_atoms(x, map, gen)).collect()),
        SymExpr::Or(xs) => SymExpr::or(xs.iter().map(|x| abstract_atoms(x, map, gen)).collect()),
        SymExpr::Xor(a, b) => {
            SymExpr::xor(abstract_atoms(a, map, gen), abstract_atoms(b, map, gen))
        }
        SymExpr::Iff(a, b) => {
            SymExpr::iff(abstract_atoms(a, map, gen), abstract_atoms(b, map, gen))
        }
        SymExpr::Ite(c, t, f) => SymExpr::ite(
            abstract_atoms(c, map, gen),
            abstract_atoms(t, map, gen),
            abstract_atoms(f, map, gen),
        ),
    }
}

fn bound_constraints(v: Var, b: &Bounds) -> Vec<SymExpr> {
    let Bounds::Range { lo, hi } = b else {
        return vec![SymExpr::ff()];
    };
    let x = LinExpr::var(v);
    let mut out = Vec::new();
    if let Some(l) = lo {
        let op = if l.attained { CmpOp::Ge } else { CmpOp::Gt };
        out.push(SymExpr::cmp(&x, op, &LinExpr::constant(l.value.clone())));
    }
    if let Some(h) = hi {
        let op = if h.attained { CmpOp::Le } else { CmpOp::Lt };
        out.push(SymExpr::cmp(&x, op, &LinExpr::constant(h.value.clone())));
    }
    out
}

/// Sound pruning for sets mixing Boolean structure and linear arithmetic.
///
/// 1. Atoms decided by the set are replaced by their value.
/// 2. Remaining atoms are abstracted to opaque Boolean variables and the Boolean part is
///    pruned onto the Bool relevant variables.
/// 3. The top-level linear equations are pruned onto the Real relevant variables.
/// 4. Each fresh Real variable is boxed by its bounds over the original set.
pub fn prune_mixed(
    cs: &ConstraintSet,
    r: &[Var],
    fresh: &mut FreshGen,
    caps: &Caps,
) -> Result<PruneResult, PruneError> {
    let all = cs.to_vec();
    if !is_sat(&all, caps)? {
        return Ok(PruneResult {
            constraints: single(SymExpr::ff()),
            fresh: Vec::new(),
            quality: Quality::Sound,
            witness: Vec::new(),
        });
    }
    let r_bool: Vec<Var> = r.iter().copied().filter(|v| v.sort == Sort::Bool).collect();
    let r_real: Vec<Var> = r.iter().copied().filter(|v| v.sort == Sort::Real).collect();

    let mut lits = Vec::new();
    let mut structured = Vec::new();
    for c in &all {
        match c {
            SymExpr::Atom(a) => lits.push(a.clone()),
            other => structured.push(other.clone()),
        }
    }

    let mut atoms = Vec::new();
    for c in &structured {
        c.collect_atoms(&mut atoms);
    }
    let mut known = Subst::new();
    for a in &atoms {
        let b = match decided(&lits, a, caps)? {
            Some(b) => Some(b),
            None => match check_predicate(&all, &SymExpr::Atom(a.clone()), caps) {
                Ok(Validity::Valid) => Some(true),
                Ok(Validity::Unsat) => Some(false),
                Ok(Validity::Contingent) | Err(SolverError::ResourceExceeded(_)) => None,
            },
        };
        if let Some(b) = b {
            known.set_atom(a, b);
        }
    }
    let mut ids = FreshGen::starting_at(u64::MAX / 2);
    let mut abstraction = BTreeMap::new();
    let boolean: Vec<SymExpr> = structured
        .iter()
        .map(|c| abstract_atoms(&c.apply(&known), &mut abstraction, &mut ids))
        .collect();
    let (bool_part, bits, columns) = boolean_table(&boolean, &r_bool, fresh, caps)?;

    let eqs: Vec<&LinAtom> = lits.iter().filter(|a| a.op == CmpOp::Eq).collect();
    let lin = linear_core(&eqs, &r_real, fresh)?;

    let mut constraints = bool_part;
    let mut boxes = 0;
    let with_defs: Vec<SymExpr> = all
        .iter()
        .cloned()
        .chain(lin.constraints.iter().cloned())
        .collect();
    let conj: Vec<SymExpr> = lits
        .iter()
        .cloned()
        .map(SymExpr::Atom)
        .chain(lin.constraints.iter().cloned())
        .collect();
    for v in &lin.fresh {
        let b = match bounds_of(&with_defs, *v, caps) {
            Ok(b) => b,
            Err(SolverError::ResourceExceeded(_)) => bounds_of(&conj, *v, caps)?,
        };
        for c in bound_constraints(*v, &b) {
            boxes += 1;
            constraints.insert_raw(c);
        }
    }
    for c in lin.constraints.iter() {
        constraints.insert_raw(c.clone());
    }
    check_bound(
        &constraints,
        mixed_bound(r_bool.len(), columns, r_real.len(), boxes),
    )?;
    let mut fresh_vars = bits;
    fresh_vars.extend(lin.fresh);
    Ok(PruneResult {
        constraints,
        fresh: fresh_vars,
        quality: Quality::Sound,
        witness: lin.witness,
    })
}
