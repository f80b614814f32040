//! Fourier–Motzkin elimination over exact rationals with strictness tracking.

use super::SolverError;
use crate::rational::{fmt_exact, Rational};
use crate::symbolic::{CmpOp, LinAtom, Var};
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    Le,
    Lt,
    Eq,
}

/// `Σ coeff·var rel rhs`
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    pub coeffs: BTreeMap<Var, Rational>,
    pub rel: Rel,
    pub rhs: Rational,
}

impl Constraint {
    /// Encodes a canonical atom; `Ge`/`Gt` are negated into `Le`/`Lt`.
    pub fn from_atom(a: &LinAtom) -> Constraint {
        let neg = |m: &BTreeMap<Var, Rational>| m.iter().map(|(v, c)| (*v, -c.clone())).collect();
        match a.op {
            CmpOp::Lt => Constraint {
                coeffs: a.lhs.clone(),
                rel: Rel::Lt,
                rhs: a.rhs.clone(),
            },
            CmpOp::Le => Constraint {
                coeffs: a.lhs.clone(),
                rel: Rel::Le,
                rhs: a.rhs.clone(),
            },
            CmpOp::Eq => Constraint {
                coeffs: a.lhs.clone(),
                rel: Rel::Eq,
                rhs: a.rhs.clone(),
            },
            CmpOp::Ge => Constraint {
                coeffs: neg(&a.lhs),
                rel: Rel::Le,
                rhs: -a.rhs.clone(),
            },
            CmpOp::Gt => Constraint {
                coeffs: neg(&a.lhs),
                rel: Rel::Lt,
                rhs: -a.rhs.clone(),
            },
        }
    }

    pub fn holds(&self, env: &HashMap<Var, Rational>) -> bool {
        let mut lhs = Rational::zero();
        for (v, c) in &self.coeffs {
            lhs += c * env.get(v).cloned().unwrap_or_else(Rational::zero);
        }
        match self.rel {
            Rel::Le => lhs <= self.rhs,
            Rel::Lt => lhs < self.rhs,
            Rel::Eq => lhs == self.rhs,
        }
    }

    fn is_ground_true(&self) -> bool {
        let z = Rational::zero();
        match self.rel {
            Rel::Le => z <= self.rhs,
            Rel::Lt => z < self.rhs,
            Rel::Eq => z == self.rhs,
        }
    }
}

/// One end of an interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Endpoint {
    pub value: Rational,
    pub attained: bool,
}

impl Endpoint {
    pub fn closed(value: Rational) -> Self {
        Endpoint {
            value,
            attained: true,
        }
    }

    pub fn open(value: Rational) -> Self {
        Endpoint {
            value,
            attained: false,
        }
    }
}

/// Range of a variable over the models of a constraint set. `None` ends are infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bounds {
    Empty,
    Range {
        lo: Option<Endpoint>,
        hi: Option<Endpoint>,
    },
}

impl Bounds {
    pub fn unbounded() -> Self {
        Bounds::Range { lo: None, hi: None }
    }

    pub fn closed(lo: Rational, hi: Rational) -> Self {
        Bounds::Range {
            lo: Some(Endpoint::closed(lo)),
            hi: Some(Endpoint::closed(hi)),
        }
    }

    /// The single value, if the range is a closed point.
    pub fn point(&self) -> Option<&Rational> {
        match self {
            Bounds::Range {
                lo: Some(l),
                hi: Some(h),
            } if l.attained && h.attained && l.value == h.value => Some(&l.value),
            _ => None,
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        match self {
            Bounds::Empty => false,
            Bounds::Range { lo, hi } => {
                lo.as_ref().is_none_or(|l| {
                    if l.attained {
                        x >= &l.value
                    } else {
                        x > &l.value
                    }
                }) && hi.as_ref().is_none_or(|h| {
                    if h.attained {
                        x <= &h.value
                    } else {
                        x < &h.value
                    }
                })
            }
        }
    }

    /// Smallest range containing both.
    pub fn hull(&self, other: &Bounds) -> Bounds {
        match (self, other) {
            (Bounds::Empty, b) | (b, Bounds::Empty) => b.clone(),
            (Bounds::Range { lo: l1, hi: h1 }, Bounds::Range { lo: l2, hi: h2 }) => {
                let lo = match (l1, l2) {
                    (Some(a), Some(b)) => Some(if a.value < b.value {
                        a.clone()
                    } else if b.value < a.value {
                        b.clone()
                    } else {
                        Endpoint {
                            value: a.value.clone(),
                            attained: a.attained || b.attained,
                        }
                    }),
                    _ => None,
                };
                let hi = match (h1, h2) {
                    (Some(a), Some(b)) => Some(if a.value > b.value {
                        a.clone()
                    } else if b.value > a.value {
                        b.clone()
                    } else {
                        Endpoint {
                            value: a.value.clone(),
                            attained: a.attained || b.attained,
                        }
                    }),
                    _ => None,
                };
                Bounds::Range { lo, hi }
            }
        }
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bounds::Empty => f.write_str("empty"),
            Bounds::Range { lo, hi } => {
                match lo {
                    Some(l) if l.attained => write!(f, "[{}", fmt_exact(&l.value))?,
                    Some(l) => write!(f, "({}", fmt_exact(&l.value))?,
                    None => f.write_str("(-inf")?,
                }
                f.write_str(",")?;
                match hi {
                    Some(h) if h.attained => write!(f, "{}]", fmt_exact(&h.value)),
                    Some(h) => write!(f, "{})", fmt_exact(&h.value)),
                    None => f.write_str("inf)"),
                }
            }
        }
    }
}

/// Eliminates equalities by substitution, never pivoting on `keep`.
/// Returns `None` when a ground equality is violated.
fn substitute_equalities(cs: Vec<Constraint>, keep: Option<Var>) -> Option<Vec<Constraint>> {
    let mut rest: Vec<Constraint> = Vec::with_capacity(cs.len());
    let mut eqs: Vec<Constraint> = Vec::new();
    for c in cs {
        if c.rel == Rel::Eq {
            eqs.push(c);
        } else {
            rest.push(c);
        }
    }
    while let Some(eq) = eqs.pop() {
        let pivot = eq.coeffs.keys().rev().find(|v| Some(**v) != keep).copied();
        let Some(p) = pivot else {
            if eq.coeffs.is_empty() {
                if !eq.is_ground_true() {
                    return None;
                }
            } else {
                // only `keep` remains: split into two inequalities
                let neg = Constraint {
                    coeffs: eq.coeffs.iter().map(|(v, c)| (*v, -c.clone())).collect(),
                    rel: Rel::Le,
                    rhs: -eq.rhs.clone(),
                };
                rest.push(Constraint { rel: Rel::Le, ..eq });
                rest.push(neg);
            }
            continue;
        };
        let cp = eq.coeffs[&p].clone();
        let subst = |c: &mut Constraint| {
            if let Some(k) = c.coeffs.remove(&p) {
                let f = &k / &cp;
                for (v, a) in &eq.coeffs {
                    if *v == p {
                        continue;
                    }
                    let e = c.coeffs.entry(*v).or_insert_with(Rational::zero);
                    *e -= &f * a;
                    if e.is_zero() {
                        c.coeffs.remove(v);
                    }
                }
                c.rhs -= &f * &eq.rhs;
            }
        };
        for c in rest.iter_mut() {
            subst(c);
        }
        for c in eqs.iter_mut() {
            subst(c);
        }
    }
    Some(rest)
}

/// Scales so the largest variable has coefficient ±1.
fn normalize(mut c: Constraint) -> Constraint {
    if let Some((_, lead)) = c.coeffs.iter().next_back() {
        let s = lead.abs().recip();
        if !s.is_one() {
            for v in c.coeffs.values_mut() {
                *v *= &s;
            }
            c.rhs *= &s;
        }
    }
    c
}

/// Keeps the tightest constraint per coefficient vector; `None` on a false ground constraint.
fn dedup(cs: Vec<Constraint>) -> Option<Vec<Constraint>> {
    let mut best: BTreeMap<BTreeMap<Var, Rational>, (Rational, bool)> = BTreeMap::new();
    for c in cs {
        if c.coeffs.is_empty() {
            if !c.is_ground_true() {
                return None;
            }
            continue;
        }
        let c = normalize(c);
        let strict = c.rel == Rel::Lt;
        match best.get_mut(&c.coeffs) {
            Some((rhs, s)) => {
                if c.rhs < *rhs {
                    *rhs = c.rhs;
                    *s = strict;
                } else if c.rhs == *rhs {
                    *s |= strict;
                }
            }
            None => {
                best.insert(c.coeffs, (c.rhs, strict));
            }
        }
    }
    Some(
        best.into_iter()
            .map(|(coeffs, (rhs, strict))| Constraint {
                coeffs,
                rel: if strict { Rel::Lt } else { Rel::Le },
                rhs,
            })
            .collect(),
    )
}

/// Projects the system onto `keep` (or onto nothing). `Ok(None)` means infeasible.
pub fn eliminate(
    cs: Vec<Constraint>,
    keep: Option<Var>,
    cap: usize,
) -> Result<Option<Vec<Constraint>>, SolverError> {
    let Some(cs) = substitute_equalities(cs, keep) else {
        return Ok(None);
    };
    let Some(mut cs) = dedup(cs) else {
        return Ok(None);
    };
    loop {
        let vars: BTreeSet<Var> = cs
            .iter()
            .flat_map(|c| c.coeffs.keys().copied())
            .filter(|v| Some(*v) != keep)
            .collect();
        let Some(v) = vars
            .iter()
            .min_by_key(|v| {
                let pos = cs
                    .iter()
                    .filter(|c| c.coeffs.get(v).is_some_and(|a| a.is_positive()))
                    .count();
                let neg = cs
                    .iter()
                    .filter(|c| c.coeffs.get(v).is_some_and(|a| a.is_negative()))
                    .count();
                pos * neg
            })
            .copied()
        else {
            return Ok(Some(cs));
        };
        let (mut pos, mut neg, mut next) = (Vec::new(), Vec::new(), Vec::new());
        for c in cs {
            match c.coeffs.get(&v) {
                Some(a) if a.is_positive() => pos.push(c),
                Some(_) => neg.push(c),
                None => next.push(c),
            }
        }
        if next.len() + pos.len() * neg.len() > cap {
            return Err(SolverError::ResourceExceeded(format!(
                "Fourier-Motzkin step would produce {} constraints",
                next.len() + pos.len() * neg.len()
            )));
        }
        for p in &pos {
            let a = p.coeffs[&v].clone();
            for n in &neg {
                let b = -n.coeffs[&v].clone();
                // p/a + n/b cancels v
                let mut coeffs: BTreeMap<Var, Rational> = BTreeMap::new();
                for (x, c) in p
                    .coeffs
                    .iter()
                    .map(|(x, c)| (x, c / &a))
                    .chain(n.coeffs.iter().map(|(x, c)| (x, c / &b)))
                {
                    if *x == v {
                        continue;
                    }
                    let e = coeffs.entry(*x).or_insert_with(Rational::zero);
                    *e += c;
                    if e.is_zero() {
                        coeffs.remove(x);
                    }
                }
                next.push(Constraint {
                    coeffs,
                    rel: if p.rel == Rel::Lt || n.rel == Rel::Lt {
                        Rel::Lt
                    } else {
                        Rel::Le
                    },
                    rhs: &p.rhs / &a + &n.rhs / &b,
                });
            }
        }
        match dedup(next) {
            Some(d) => cs = d,
            None => return Ok(None),
        }
    }
}

pub fn feasible(cs: Vec<Constraint>, cap: usize) -> Result<bool, SolverError> {
    Ok(eliminate(cs, None, cap)?.is_some())
}

/// Exact range of `v` over the solutions of a conjunction.
pub fn bounds(cs: Vec<Constraint>, v: Var, cap: usize) -> Result<Bounds, SolverError> {
    let Some(rest) = eliminate(cs, Some(v), cap)? else {
        return Ok(Bounds::Empty);
    };
    let mut lo: Option<Endpoint> = None;
    let mut hi: Option<Endpoint> = None;
    for c in rest {
        let a = c.coeffs.get(&v).cloned().unwrap_or_else(Rational::zero);
        let val = &c.rhs / &a;
        let attained = c.rel != Rel::Lt;
        if a.is_positive() {
            let tighter = match &hi {
                None => true,
                Some(h) => val < h.value || (val == h.value && !attained),
            };
            if tighter {
                hi = Some(Endpoint {
                    value: val,
                    attained,
                });
            }
        } else {
            let tighter = match &lo {
                None => true,
                Some(l) => val > l.value || (val == l.value && !attained),
            };
            if tighter {
                lo = Some(Endpoint {
                    value: val,
                    attained,
                });
            }
        }
    }
    if let (Some(l), Some(h)) = (&lo, &hi) {
        if l.value > h.value || (l.value == h.value && !(l.attained && h.attained)) {
            return Ok(Bounds::Empty);
        }
    }
    Ok(Bounds::Range { lo, hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::spec::Sort;

    fn v(i: usize) -> Var {
        Var::stream(i, 0, Sort::Real)
    }

    fn c(terms: &[(usize, i64)], rel: Rel, rhs: i64) -> Constraint {
        Constraint {
            coeffs: terms.iter().map(|(i, a)| (v(*i), int(*a))).collect(),
            rel,
            rhs: int(rhs),
        }
    }

    #[test]
    fn cube_sum_bounds() {
        // 0 ≤ i_j ≤ 1, x = i0 + i1 + i2  →  x ∈ [0, 3]
        let mut cs = Vec::new();
        for j in 0..3 {
            cs.push(c(&[(j, -1)], Rel::Le, 0));
            cs.push(c(&[(j, 1)], Rel::Le, 1));
        }
        cs.push(c(&[(3, 1), (0, -1), (1, -1), (2, -1)], Rel::Eq, 0));
        assert_eq!(
            bounds(cs, v(3), 1000).unwrap(),
            Bounds::closed(int(0), int(3))
        );
    }

    #[test]
    fn strictness_is_tracked() {
        let cs = vec![c(&[(0, 1)], Rel::Lt, 2), c(&[(0, -1)], Rel::Le, 0)];
        let b = bounds(cs, v(0), 100).unwrap();
        assert_eq!(b.to_string(), "[0,2)");
        let cs = vec![c(&[(0, 1)], Rel::Lt, 2), c(&[(0, -1)], Rel::Le, -2)];
        assert_eq!(bounds(cs, v(0), 100).unwrap(), Bounds::Empty);
        assert!(!feasible(
            vec![
                c(&[(0, 1), (1, 1)], Rel::Lt, 0),
                c(&[(0, -1), (1, -1)], Rel::Lt, 0)
            ],
            100
        )
        .unwrap());
    }

    #[test]
    fn unconstrained_and_inconsistent() {
        assert_eq!(bounds(vec![], v(0), 10).unwrap(), Bounds::unbounded());
        assert_eq!(
            bounds(vec![c(&[], Rel::Eq, 1)], v(0), 10).unwrap(),
            Bounds::Empty
        );
    }

    #[test]
    fn hull_and_display() {
        let a = Bounds::closed(int(0), int(3));
        let b = Bounds::Range {
            lo: Some(Endpoint::open(int(3))),
            hi: Some(Endpoint::open(int(5))),
        };
        assert_eq!(a.hull(&b).to_string(), "[0,5)");
        assert_eq!(Bounds::unbounded().to_string(), "(-inf,inf)");
        assert!(a.contains(&int(3)) && !b.contains(&int(3)));
    }
}
