use super::expr::{mk_and, mk_iff, mk_ite, mk_not, mk_or, mk_xor, ConstraintSet, SymExpr, Term};
use super::lin::{CmpOp, LinExpr};
use super::var::{Names, Var};
use crate::rational::{fmt_exact, Rational};
use crate::spec::{BinOp, Sort, Specification, StreamExpr, UnOp, Value};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymError {
    #[error("unknown stream `{0}`")]
    UnknownStream(String),
    #[error("reading for `{stream}` has sort {found}, expected {expected}")]
    SortMismatch {
        stream: String,
        expected: Sort,
        found: Sort,
    },
    #[error("invalid range [{lo}, {hi}] for `{stream}`")]
    InvalidRange {
        stream: String,
        lo: String,
        hi: String,
    },
    #[error("`{0}` is not an input stream")]
    NotAnInput(String),
    #[error("unsupported expression: {0}")]
    Unsupported(String),
}

/// Knowledge about one input value at one instant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Reading {
    Exact(Value),
    Range(Rational, Rational),
    Unknown,
}

/// Translates stream expressions into symbolic terms over instant variables.
#[derive(Debug, Clone)]
pub struct Instantiator {
    index: HashMap<String, usize>,
    sorts: Vec<Sort>,
    names: Names,
}

impl Instantiator {
    pub fn new(spec: &Specification) -> Self {
        let names: Vec<String> = spec.stream_names();
        Instantiator {
            index: names
                .iter()
                .enumerate()
                .map(|(i, n)| (n.clone(), i))
                .collect(),
            sorts: spec.streams().map(|d| d.sort).collect(),
            names: Names::new(names),
        }
    }

    pub fn names(&self) -> &Names {
        &self.names
    }

    pub fn index_of(&self, stream: &str) -> Result<usize, SymError> {
        self.index
            .get(stream)
            .copied()
            .ok_or_else(|| SymError::UnknownStream(stream.to_string()))
    }

    pub fn var(&self, stream: usize, t: u64) -> Var {
        Var::stream(stream, t, self.sorts[stream])
    }

    pub fn var_of(&self, stream: &str, t: u64) -> Result<Var, SymError> {
        Ok(self.var(self.index_of(stream)?, t))
    }

    fn var_term(v: Var) -> Term {
        match v.sort {
            Sort::Bool => Term::Bool(SymExpr::Var(v)),
            Sort::Real => Term::Real(LinExpr::var(v)),
        }
    }

    /// `⟦e⟧(t)`: offsets reaching before instant 0 take their default.
    pub fn term(&self, e: &StreamExpr, t: u64) -> Result<Term, SymError> {
        let bool_of = |x: Term| match x {
            Term::Bool(b) => Ok(b),
            Term::Real(_) => Err(SymError::Unsupported(format!("Real operand in {e}"))),
        };
        let real_of = |x: Term| match x {
            Term::Real(r) => Ok(r),
            Term::Bool(_) => Err(SymError::Unsupported(format!("Bool operand in {e}"))),
        };
        Ok(match e {
            StreamExpr::Const(Value::Bool(b)) => Term::Bool(SymExpr::Const(*b)),
            StreamExpr::Const(Value::Real(r)) => Term::Real(LinExpr::constant(r.clone())),
            StreamExpr::Offset {
                stream,
                offset,
                default,
            } => {
                let at = t as i64 + offset;
                if at < 0 {
                    let d = default
                        .as_ref()
                        .ok_or_else(|| SymError::Unsupported(format!("missing default in {e}")))?;
                    return self.term(&StreamExpr::Const(d.clone()), t);
                }
                Self::var_term(self.var_of(stream, at as u64)?)
            }
            StreamExpr::Unary(UnOp::Not, a) => Term::Bool(mk_not(bool_of(self.term(a, t)?)?)),
            StreamExpr::Unary(UnOp::Neg, a) => {
                Term::Real(real_of(self.term(a, t)?)?.scale(&-Rational::from_integer(1.into())))
            }
            StreamExpr::Binary(op, a, b) => {
                let x = self.term(a, t)?;
                let y = self.term(b, t)?;
                match op {
                    BinOp::And => Term::Bool(mk_and(vec![bool_of(x)?, bool_of(y)?])),
                    BinOp::Or => Term::Bool(mk_or(vec![bool_of(x)?, bool_of(y)?])),
                    BinOp::Xor => Term::Bool(mk_xor(bool_of(x)?, bool_of(y)?)),
                    BinOp::Implies => Term::Bool(mk_or(vec![mk_not(bool_of(x)?), bool_of(y)?])),
                    BinOp::Add => Term::Real(real_of(x)?.plus(&real_of(y)?)),
                    BinOp::Sub => Term::Real(real_of(x)?.minus(&real_of(y)?)),
                    BinOp::Mul => {
                        let (x, y) = (real_of(x)?, real_of(y)?);
                        if x.is_constant() {
                            Term::Real(y.scale(&x.constant))
                        } else if y.is_constant() {
                            Term::Real(x.scale(&y.constant))
                        } else {
                            return Err(SymError::Unsupported(format!("nonlinear product {e}")));
                        }
                    }
                    BinOp::Lt => Term::Bool(SymExpr::cmp(&real_of(x)?, CmpOp::Lt, &real_of(y)?)),
                    BinOp::Le => Term::Bool(SymExpr::cmp(&real_of(x)?, CmpOp::Le, &real_of(y)?)),
                    BinOp::Eq => match (x, y) {
                        (Term::Bool(p), Term::Bool(q)) => Term::Bool(mk_iff(p, q)),
                        (Term::Real(p), Term::Real(q)) => {
                            Term::Bool(SymExpr::cmp(&p, CmpOp::Eq, &q))
                        }
                        _ => return Err(SymError::Unsupported(format!("mixed-sort equality {e}"))),
                    },
                }
            }
            StreamExpr::Ite(c, a, b) => {
                let c = bool_of(self.term(c, t)?)?;
                let (x, y) = (self.term(a, t)?, self.term(b, t)?);
                match (x, y) {
                    (Term::Bool(p), Term::Bool(q)) => Term::Bool(mk_ite(c, p, q)),
                    (x, y) => match c {
                        SymExpr::Const(true) => x,
                        SymExpr::Const(false) => y,
                        _ => {
                            return Err(SymError::Unsupported(format!(
                                "Real ite must be rewritten first: {e}"
                            )))
                        }
                    },
                }
            }
        })
    }

    /// `y^t = ⟦E_y⟧(t)` for every output.
    pub fn step_equations(&self, spec: &Specification, t: u64) -> Result<Vec<SymExpr>, SymError> {
        let mut out = Vec::with_capacity(spec.outputs.len());
        for d in &spec.outputs {
            let rhs = self.term(d.expr.as_ref().expect("output without definition"), t)?;
            let lhs = Self::var_term(self.var_of(&d.name, t)?);
            out.push(SymExpr::term_eq(&lhs, &rhs));
        }
        Ok(out)
    }

    pub fn assumptions(&self, spec: &Specification, t: u64) -> Result<Vec<SymExpr>, SymError> {
        spec.assumptions
            .iter()
            .map(|a| match self.term(a, t)? {
                Term::Bool(b) => Ok(b),
                Term::Real(_) => Err(SymError::Unsupported(format!("Real assumption {a}"))),
            })
            .collect()
    }

    pub fn reading(
        &self,
        stream: &str,
        t: u64,
        reading: &Reading,
    ) -> Result<Vec<SymExpr>, SymError> {
        let v = self.var_of(stream, t)?;
        let mismatch = |found| SymError::SortMismatch {
            stream: stream.to_string(),
            expected: v.sort,
            found,
        };
        Ok(match reading {
            Reading::Unknown => vec![],
            Reading::Exact(Value::Bool(b)) => {
                if v.sort != Sort::Bool {
                    return Err(mismatch(Sort::Bool));
                }
                vec![if *b {
                    SymExpr::Var(v)
                } else {
                    SymExpr::not(SymExpr::Var(v))
                }]
            }
            Reading::Exact(Value::Real(r)) => {
                if v.sort != Sort::Real {
                    return Err(mismatch(Sort::Real));
                }
                vec![SymExpr::cmp(
                    &LinExpr::var(v),
                    CmpOp::Eq,
                    &LinExpr::constant(r.clone()),
                )]
            }
            Reading::Range(lo, hi) => {
                if v.sort != Sort::Real {
                    return Err(mismatch(Sort::Real));
                }
                if lo > hi {
                    return Err(SymError::InvalidRange {
                        stream: stream.to_string(),
                        lo: fmt_exact(lo),
                        hi: fmt_exact(hi),
                    });
                }
                let x = LinExpr::var(v);
                vec![
                    SymExpr::cmp(&LinExpr::constant(lo.clone()), CmpOp::Le, &x),
                    SymExpr::cmp(&x, CmpOp::Le, &LinExpr::constant(hi.clone())),
                ]
            }
        })
    }
}

pub fn instantiate_step(spec: &Specification, t: u64) -> Result<ConstraintSet, SymError> {
    Ok(Instantiator::new(spec)
        .step_equations(spec, t)?
        .into_iter()
        .collect())
}

pub fn instantiate_assumptions(spec: &Specification, t: u64) -> Result<ConstraintSet, SymError> {
    Ok(Instantiator::new(spec)
        .assumptions(spec, t)?
        .into_iter()
        .collect())
}

pub fn encode_reading(
    spec: &Specification,
    stream: &str,
    t: u64,
    reading: &Reading,
) -> Result<ConstraintSet, SymError> {
    Ok(Instantiator::new(spec)
        .reading(stream, t, reading)?
        .into_iter()
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::spec::parse_spec;

    const WINDOW3: &str =
        "input ld: Real\noutput acc := acc[-1|0] + ld[now]\noutput ok := acc[now] <= 15";

    fn show(spec: &Specification, c: &ConstraintSet) -> Vec<String> {
        let names = Names::new(spec.stream_names());
        c.iter().map(|e| e.display(&names).to_string()).collect()
    }

    #[test]
    fn first_instant() {
        let spec = parse_spec(WINDOW3).unwrap();
        let c = instantiate_step(&spec, 0).unwrap();
        assert_eq!(
            show(&spec, &c),
            vec!["acc^0 = ld^0", "(ok^0 <-> acc^0 <= 15)"]
        );
    }

    #[test]
    fn sliding_window_instant() {
        let spec = parse_spec(
            "input ld: Real\noutput acc := acc[-1|0] + ld[now] - ld[-3|0]\noutput ok := acc[now] <= 15",
        )
        .unwrap();
        let c = instantiate_step(&spec, 3).unwrap();
        assert!(show(&spec, &c).contains(&"acc^3 = -ld^0 + acc^2 + ld^3".to_string()));
    }

    #[test]
    fn constant_stream() {
        let spec = parse_spec("output k := 5").unwrap();
        let c = instantiate_step(&spec, 7).unwrap();
        assert_eq!(show(&spec, &c), vec!["k^7 = 5"]);
    }

    #[test]
    fn assumptions_use_defaults_early() {
        let spec = parse_spec(
            "input ld: Real\nassumption 1 <= ld[now] && ld[now] <= 10\nassumption ld[-1|0] + 1 >= ld[now]",
        )
        .unwrap();
        let at2 = instantiate_assumptions(&spec, 2).unwrap();
        assert_eq!(show(&spec, &at2).len(), 3);
        let at0 = Instantiator::new(&spec).assumptions(&spec, 0).unwrap();
        assert_eq!(
            at0[1].display(&Names::new(spec.stream_names())).to_string(),
            "ld^0 <= 1"
        );
        assert!(
            instantiate_assumptions(&parse_spec("input x: Real").unwrap(), 0)
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn readings() {
        let spec = parse_spec(WINDOW3).unwrap();
        let c = encode_reading(&spec, "ld", 3, &Reading::Exact(Value::Real(int(7)))).unwrap();
        assert_eq!(show(&spec, &c), vec!["ld^3 = 7"]);
        let c = encode_reading(&spec, "ld", 0, &Reading::Range(int(1), int(5))).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.measure(), 4);
        assert!(encode_reading(&spec, "ld", 4, &Reading::Unknown)
            .unwrap()
            .is_empty());
        assert!(matches!(
            encode_reading(&spec, "ld", 0, &Reading::Range(int(5), int(1))),
            Err(SymError::InvalidRange { .. })
        ));
        assert!(matches!(
            encode_reading(&spec, "ld", 0, &Reading::Exact(Value::Bool(true))),
            Err(SymError::SortMismatch { .. })
        ));
    }
}
