//! Non-relational baseline: interval arithmetic for Reals, Kleene logic for Booleans.

use crate::monitor::MonitorError;
use crate::rational::{fmt_exact, Rational};
use crate::spec::{check_well_formed, BinOp, Sort, Specification, StreamExpr, UnOp, Value};
use crate::symbolic::{Reading, SymError};
use log::warn;
use num_traits::{Signed, Zero};
use std::collections::{HashMap, VecDeque};
use std::fmt;

/// Closed interval; `None` ends are infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Option<Rational>,
    pub hi: Option<Rational>,
}

impl Interval {
    pub fn top() -> Self {
        Interval { lo: None, hi: None }
    }

    pub fn point(r: Rational) -> Self {
        Interval {
            lo: Some(r.clone()),
            hi: Some(r),
        }
    }

    pub fn closed(lo: Rational, hi: Rational) -> Self {
        Interval {
            lo: Some(lo),
            hi: Some(hi),
        }
    }

    pub fn as_point(&self) -> Option<&Rational> {
        match (&self.lo, &self.hi) {
            (Some(a), Some(b)) if a == b => Some(a),
            _ => None,
        }
    }

    pub fn contains(&self, r: &Rational) -> bool {
        self.lo.as_ref().is_none_or(|l| l <= r) && self.hi.as_ref().is_none_or(|h| r <= h)
    }

    fn add(&self, o: &Interval) -> Interval {
        let sum = |a: &Option<Rational>, b: &Option<Rational>| match (a, b) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        Interval {
            lo: sum(&self.lo, &o.lo),
            hi: sum(&self.hi, &o.hi),
        }
    }

    fn neg(&self) -> Interval {
        Interval {
            lo: self.hi.as_ref().map(|h| -h),
            hi: self.lo.as_ref().map(|l| -l),
        }
    }

    fn scale(&self, c: &Rational) -> Interval {
        if c.is_zero() {
            return Interval::point(Rational::zero());
        }
        let s = Interval {
            lo: self.lo.as_ref().map(|l| l * c.abs()),
            hi: self.hi.as_ref().map(|h| h * c.abs()),
        };
        if c.is_negative() {
            s.neg()
        } else {
            s
        }
    }

    fn hull(&self, o: &Interval) -> Interval {
        let lo = match (&self.lo, &o.lo) {
            (Some(a), Some(b)) => Some(a.min(b).clone()),
            _ => None,
        };
        let hi = match (&self.hi, &o.hi) {
            (Some(a), Some(b)) => Some(a.max(b).clone()),
            _ => None,
        };
        Interval { lo, hi }
    }

    /// Intersection; an empty result keeps `self`.
    fn meet(&self, o: &Interval) -> Interval {
        let lo = match (&self.lo, &o.lo) {
            (Some(a), Some(b)) => Some(a.max(b).clone()),
            (a, b) => a.clone().or(b.clone()),
        };
        let hi = match (&self.hi, &o.hi) {
            (Some(a), Some(b)) => Some(a.min(b).clone()),
            (a, b) => a.clone().or(b.clone()),
        };
        match (&lo, &hi) {
            (Some(l), Some(h)) if l > h => self.clone(),
            _ => Interval { lo, hi },
        }
    }

    /// `self < o` (strict) or `self <= o`.
    fn less(&self, o: &Interval, strict: bool) -> Option<bool> {
        let below = |a: &Option<Rational>, b: &Option<Rational>, strict: bool| match (a, b) {
            (Some(a), Some(b)) => {
                if strict {
                    a < b
                } else {
                    a <= b
                }
            }
            _ => false,
        };
        if below(&self.hi, &o.lo, strict) {
            Some(true)
        } else if below(&o.hi, &self.lo, !strict) {
            Some(false)
        } else {
            None
        }
    }

    fn equal(&self, o: &Interval) -> Option<bool> {
        match (self.as_point(), o.as_point()) {
            (Some(a), Some(b)) if a == b => Some(true),
            _ if self.less(o, true) == Some(true) || o.less(self, true) == Some(true) => {
                Some(false)
            }
            _ => None,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = self.as_point() {
            return f.write_str(&fmt_exact(p));
        }
        match &self.lo {
            Some(l) => write!(f, "[{}", fmt_exact(l))?,
            None => f.write_str("(-inf")?,
        }
        match &self.hi {
            Some(h) => write!(f, ",{}]", fmt_exact(h)),
            None => f.write_str(",inf)"),
        }
    }
}

/// Abstract value: three-valued Boolean (`None` is unknown) or a Real interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AbsVal {
    Bool3(Option<bool>),
    Interval(Interval),
}

impl AbsVal {
    pub fn top(sort: Sort) -> AbsVal {
        match sort {
            Sort::Bool => AbsVal::Bool3(None),
            Sort::Real => AbsVal::Interval(Interval::top()),
        }
    }

    pub fn is_determined(&self) -> bool {
        match self {
            AbsVal::Bool3(b) => b.is_some(),
            AbsVal::Interval(i) => i.as_point().is_some(),
        }
    }

    /// Whether the concrete value `v` lies in this abstraction.
    pub fn covers(&self, v: &Value) -> bool {
        match (self, v) {
            (AbsVal::Bool3(None), Value::Bool(_)) => true,
            (AbsVal::Bool3(Some(a)), Value::Bool(b)) => a == b,
            (AbsVal::Interval(i), Value::Real(r)) => i.contains(r),
            _ => false,
        }
    }

    fn of_value(v: &Value) -> AbsVal {
        match v {
            Value::Bool(b) => AbsVal::Bool3(Some(*b)),
            Value::Real(r) => AbsVal::Interval(Interval::point(r.clone())),
        }
    }

    fn bool3(&self) -> Option<bool> {
        match self {
            AbsVal::Bool3(b) => *b,
            AbsVal::Interval(_) => panic!("sort error in checked specification"),
        }
    }

    fn interval(&self) -> &Interval {
        match self {
            AbsVal::Interval(i) => i,
            AbsVal::Bool3(_) => panic!("sort error in checked specification"),
        }
    }
}

impl fmt::Display for AbsVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbsVal::Bool3(Some(true)) => f.write_str("tt"),
            AbsVal::Bool3(Some(false)) => f.write_str("ff"),
            AbsVal::Bool3(None) => f.write_str("?"),
            AbsVal::Interval(i) => write!(f, "{i}"),
        }
    }
}

fn kleene_and(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    }
}

fn kleene_not(a: Option<bool>) -> Option<bool> {
    a.map(|b| !b)
}

fn kleene_or(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    kleene_not(kleene_and(kleene_not(a), kleene_not(b)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbsVerdict {
    pub t: u64,
    pub stream: String,
    pub value: AbsVal,
}

impl AbsVerdict {
    /// Tab-separated `t stream abs payload`.
    pub fn record(&self) -> String {
        format!("{}\t{}\tabs\t{}", self.t, self.stream, self.value)
    }
}

/// Per-input range taken from an assumption conjunct `c <= x[now]`, `x[now] <= c` or strict forms.
fn range_conjunct(e: &StreamExpr, spec: &Specification) -> Option<(String, Interval)> {
    let StreamExpr::Binary(BinOp::Le | BinOp::Lt, a, b) = e else {
        return None;
    };
    let input_now = |e: &StreamExpr| match e {
        StreamExpr::Offset {
            stream, offset: 0, ..
        } if spec.inputs.iter().any(|d| d.name == *stream) => Some(stream.clone()),
        _ => None,
    };
    let constant = |e: &StreamExpr| {
        if e.references_streams() {
            return None;
        }
        match eval(e, &|_, _, _| unreachable!("constant expression")) {
            AbsVal::Interval(i) => i.as_point().cloned(),
            AbsVal::Bool3(_) => None,
        }
    };
    if let (Some(x), Some(c)) = (input_now(a), constant(b)) {
        return Some((
            x,
            Interval {
                lo: None,
                hi: Some(c),
            },
        ));
    }
    if let (Some(c), Some(x)) = (constant(a), input_now(b)) {
        return Some((
            x,
            Interval {
                lo: Some(c),
                hi: None,
            },
        ));
    }
    None
}

fn conjuncts<'a>(e: &'a StreamExpr, out: &mut Vec<&'a StreamExpr>) {
    match e {
        StreamExpr::Binary(BinOp::And, a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        other => out.push(other),
    }
}

/// Evaluates `e` given a lookup for `(stream, offset, default)`.
fn eval(e: &StreamExpr, get: &dyn Fn(&str, i64, Option<&Value>) -> AbsVal) -> AbsVal {
    match e {
        StreamExpr::Const(v) => AbsVal::of_value(v),
        StreamExpr::Offset {
            stream,
            offset,
            default,
        } => get(stream, *offset, default.as_ref()),
        StreamExpr::Unary(UnOp::Not, a) => AbsVal::Bool3(kleene_not(eval(a, get).bool3())),
        StreamExpr::Unary(UnOp::Neg, a) => AbsVal::Interval(eval(a, get).interval().neg()),
        StreamExpr::Binary(op, a, b) => {
            let x = eval(a, get);
            let y = eval(b, get);
            match op {
                BinOp::And => AbsVal::Bool3(kleene_and(x.bool3(), y.bool3())),
                BinOp::Or => AbsVal::Bool3(kleene_or(x.bool3(), y.bool3())),
                BinOp::Xor => AbsVal::Bool3(match (x.bool3(), y.bool3()) {
                    (Some(p), Some(q)) => Some(p ^ q),
                    _ => None,
                }),
                BinOp::Implies => AbsVal::Bool3(kleene_or(kleene_not(x.bool3()), y.bool3())),
                BinOp::Add => AbsVal::Interval(x.interval().add(y.interval())),
                BinOp::Sub => AbsVal::Interval(x.interval().add(&y.interval().neg())),
                BinOp::Mul => {
                    let (xi, yi) = (x.interval(), y.interval());
                    AbsVal::Interval(match (xi.as_point(), yi.as_point()) {
                        (Some(c), _) => yi.scale(c),
                        (_, Some(c)) => xi.scale(c),
                        _ => Interval::top(),
                    })
                }
                BinOp::Lt => AbsVal::Bool3(x.interval().less(y.interval(), true)),
                BinOp::Le => AbsVal::Bool3(x.interval().less(y.interval(), false)),
                BinOp::Eq => match (&x, &y) {
                    (AbsVal::Bool3(p), AbsVal::Bool3(q)) => AbsVal::Bool3(match (p, q) {
                        (Some(p), Some(q)) => Some(p == q),
                        _ => None,
                    }),
                    _ => AbsVal::Bool3(x.interval().equal(y.interval())),
                },
            }
        }
        StreamExpr::Ite(c, a, b) => match eval(c, get).bool3() {
            Some(true) => eval(a, get),
            Some(false) => eval(b, get),
            None => match (eval(a, get), eval(b, get)) {
                (AbsVal::Interval(p), AbsVal::Interval(q)) => AbsVal::Interval(p.hull(&q)),
                (p, q) if p == q => p,
                _ => AbsVal::Bool3(None),
            },
        },
    }
}

/// Interval monitor over the original (unflattened) specification.
pub struct IntervalMonitor {
    spec: Specification,
    order: Vec<String>,
    ranges: HashMap<String, Interval>,
    /// Most recent instant first.
    history: VecDeque<HashMap<String, AbsVal>>,
    depth: usize,
    t: u64,
}

impl IntervalMonitor {
    /// Assumptions other than constant ranges on current inputs are ignored with a warning.
    pub fn new(spec: &Specification) -> Result<IntervalMonitor, MonitorError> {
        let order = check_well_formed(spec)?;
        let mut ranges: HashMap<String, Interval> = HashMap::new();
        for a in &spec.assumptions {
            let mut parts = Vec::new();
            conjuncts(a, &mut parts);
            for p in parts {
                match range_conjunct(p, spec) {
                    Some((x, i)) => {
                        let cur = ranges.remove(&x).unwrap_or_else(Interval::top);
                        ranges.insert(x, cur.meet(&i));
                    }
                    None => warn!("interval monitor ignores assumption conjunct {p}"),
                }
            }
        }
        let depth = spec
            .outputs
            .iter()
            .filter_map(|d| d.expr.as_ref())
            .map(|e| e.min_offset().unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        Ok(IntervalMonitor {
            spec: spec.clone(),
            order,
            ranges,
            history: VecDeque::new(),
            depth,
            t: 0,
        })
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    fn reading(&self, name: &str, sort: Sort, r: &Reading) -> Result<AbsVal, SymError> {
        let mismatch = |found| SymError::SortMismatch {
            stream: name.to_string(),
            expected: sort,
            found,
        };
        let range = |i: Interval| match self.ranges.get(name) {
            Some(a) => i.meet(a),
            None => i,
        };
        match (r, sort) {
            (Reading::Exact(v), s) if v.sort() == s => Ok(AbsVal::of_value(v)),
            (Reading::Exact(v), _) => Err(mismatch(v.sort())),
            (Reading::Range(..), Sort::Bool) => Err(mismatch(Sort::Real)),
            (Reading::Range(lo, hi), Sort::Real) => {
                if lo > hi {
                    return Err(SymError::InvalidRange {
                        stream: name.to_string(),
                        lo: fmt_exact(lo),
                        hi: fmt_exact(hi),
                    });
                }
                Ok(AbsVal::Interval(range(Interval::closed(
                    lo.clone(),
                    hi.clone(),
                ))))
            }
            (Reading::Unknown, Sort::Bool) => Ok(AbsVal::Bool3(None)),
            (Reading::Unknown, Sort::Real) => Ok(AbsVal::Interval(range(Interval::top()))),
        }
    }

    pub fn step(
        &mut self,
        readings: &HashMap<String, Reading>,
    ) -> Result<Vec<AbsVerdict>, MonitorError> {
        for name in readings.keys() {
            match self.spec.stream(name) {
                None => return Err(SymError::UnknownStream(name.clone()).into()),
                Some(d) if d.expr.is_some() => {
                    return Err(SymError::NotAnInput(name.clone()).into())
                }
                Some(_) => {}
            }
        }
        let mut cur: HashMap<String, AbsVal> = HashMap::new();
        for d in &self.spec.inputs {
            let r = readings.get(&d.name).unwrap_or(&Reading::Unknown);
            cur.insert(d.name.clone(), self.reading(&d.name, d.sort, r)?);
        }
        let mut out = Vec::with_capacity(self.order.len());
        for name in &self.order {
            let d = self.spec.output(name).expect("ordered output");
            let expr = d.expr.as_ref().expect("output without definition");
            let t = self.t;
            let history = &self.history;
            let cur_ref = &cur;
            let get = |s: &str, off: i64, default: Option<&Value>| -> AbsVal {
                if off == 0 {
                    return cur_ref[s].clone();
                }
                let back = off.unsigned_abs();
                if back > t {
                    AbsVal::of_value(default.expect("offset without default"))
                } else {
                    history[back as usize - 1][s].clone()
                }
            };
            let v = eval(expr, &get);
            cur.insert(name.clone(), v.clone());
            out.push((name.clone(), v));
        }
        self.history.push_front(cur);
        self.history.truncate(self.depth);
        let t = self.t;
        self.t += 1;
        let mut verdicts: Vec<AbsVerdict> = out
            .into_iter()
            .map(|(stream, value)| AbsVerdict { t, stream, value })
            .collect();
        let pos = |s: &str| self.spec.outputs.iter().position(|d| d.name == s);
        verdicts.sort_by_key(|v| pos(&v.stream));
        Ok(verdicts)
    }
}

/// Runs the interval monitor over a whole trace.
pub fn run_abs(
    spec: &Specification,
    trace: &[HashMap<String, Reading>],
) -> Result<Vec<AbsVerdict>, MonitorError> {
    let mut m = IntervalMonitor::new(spec)?;
    let mut out = Vec::new();
    for row in trace {
        out.extend(m.step(row)?);
    }
    Ok(out)
}
