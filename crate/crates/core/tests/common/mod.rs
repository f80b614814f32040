//! Random specifications, traces, expressions and brute-force oracles shared by the
//! integration tests.
#![allow(dead_code)]

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, HashMap};
use symon::monitor::{Monitor, MonitorConfig, MonitorError, PruneStats, Verdict, VerdictValue};
use symon::rational::{int, Rational};
use symon::solver::{Bounds, Constraint, Rel};
use symon::spec::{parse_spec, Sort, Specification, Value};
use symon::symbolic::{CmpOp, LinExpr, Reading, SymExpr, Var};

pub mod batteries;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// Bool streams only.
    B,
    /// Real streams with linear definitions.
    LA,
    /// Both sorts, comparisons, range assumptions.
    Mixed,
    /// Both sorts with deep offsets and ites; used for rewrite checks.
    Deep,
}

pub const KINDS: [Kind; 4] = [Kind::B, Kind::LA, Kind::Mixed, Kind::Deep];

#[derive(Debug, Clone)]
pub struct Generated {
    pub text: String,
    pub spec: Specification,
    /// Inclusive integer range assumed for some Real inputs.
    pub ranges: HashMap<String, (i64, i64)>,
}

struct SpecGen<'a> {
    rng: &'a mut ChaCha8Rng,
    kind: Kind,
    inputs: Vec<(String, Sort)>,
    outputs: Vec<(String, Sort)>,
    cur: usize,
    max_offset: i64,
}

impl SpecGen<'_> {
    fn default_of(&mut self, sort: Sort) -> String {
        match sort {
            Sort::Bool => (if self.rng.gen() { "tt" } else { "ff" }).into(),
            Sort::Real => self.rng.gen_range(-2..=2).to_string(),
        }
    }

    fn reference(&mut self, sort: Sort) -> Option<String> {
        let mut options: Vec<(String, bool)> = Vec::new();
        for (n, s) in &self.inputs {
            if *s == sort {
                options.push((n.clone(), true));
            }
        }
        for (j, (n, s)) in self.outputs.iter().enumerate() {
            if *s == sort {
                options.push((n.clone(), j < self.cur));
            }
        }
        let (name, now_ok) = options.choose(self.rng)?.clone();
        if now_ok && self.rng.gen_bool(0.6) {
            Some(format!("{name}[now]"))
        } else {
            let o = self.rng.gen_range(1..=self.max_offset);
            let d = self.default_of(sort);
            Some(format!("{name}[-{o}|{d}]"))
        }
    }

    fn bexpr(&mut self, depth: u32) -> String {
        let leaf = depth == 0 || self.rng.gen_bool(0.3);
        let has_real = self.kind != Kind::B;
        if leaf {
            if has_real && self.rng.gen_bool(0.5) {
                return self.cmp(depth.saturating_sub(1));
            }
            return self.reference(Sort::Bool).unwrap_or_else(|| {
                if has_real {
                    self.cmp(0)
                } else {
                    self.default_of(Sort::Bool)
                }
            });
        }
        match self.rng.gen_range(0..6) {
            0 => format!("(!({}))", self.bexpr(depth - 1)),
            1 => format!("({} && {})", self.bexpr(depth - 1), self.bexpr(depth - 1)),
            2 => format!("({} || {})", self.bexpr(depth - 1), self.bexpr(depth - 1)),
            3 => format!("({} ^ {})", self.bexpr(depth - 1), self.bexpr(depth - 1)),
            4 => format!("({} -> {})", self.bexpr(depth - 1), self.bexpr(depth - 1)),
            _ if has_real => self.cmp(depth - 1),
            _ => format!("({} = {})", self.bexpr(depth - 1), self.bexpr(depth - 1)),
        }
    }

    fn cmp(&mut self, depth: u32) -> String {
        let op = ["<", "<=", "=", ">=", ">"][self.rng.gen_range(0..5)];
        let lhs = self.rexpr(depth);
        let rhs = if self.rng.gen_bool(0.5) {
            self.rng.gen_range(-4..=6).to_string()
        } else {
            self.rexpr(depth)
        };
        format!("({lhs} {op} {rhs})")
    }

    fn rexpr(&mut self, depth: u32) -> String {
        if depth == 0 || self.rng.gen_bool(0.3) {
            return match self.reference(Sort::Real) {
                Some(r) if self.rng.gen_bool(0.85) => r,
                _ => self.rng.gen_range(-3..=3).to_string(),
            };
        }
        let ite =
            matches!(self.kind, Kind::Deep) || (self.kind == Kind::Mixed && self.rng.gen_bool(0.2));
        match self.rng.gen_range(0..5) {
            0 => format!("({} + {})", self.rexpr(depth - 1), self.rexpr(depth - 1)),
            1 => format!("({} - {})", self.rexpr(depth - 1), self.rexpr(depth - 1)),
            2 => {
                let c = [-2, -1, 2, 3][self.rng.gen_range(0..4)];
                format!("({c} * {})", self.rexpr(depth - 1))
            }
            3 if ite => format!(
                "ite({}, {}, {})",
                self.bexpr(depth - 1),
                self.rexpr(depth - 1),
                self.rexpr(depth - 1)
            ),
            _ => format!(
                "({} + {})",
                self.rexpr(depth - 1),
                self.rng.gen_range(-2..=2)
            ),
        }
    }
}

/// A random well-formed specification of the given kind.
pub fn random_spec(kind: Kind, rng: &mut ChaCha8Rng) -> Generated {
    let sorts_in: Vec<Sort>;
    let sorts_out: Vec<Sort>;
    match kind {
        Kind::B => {
            let n = rng.gen_range(1..=2);
            sorts_in = vec![Sort::Bool; n];
            sorts_out = vec![Sort::Bool; rng.gen_range(1..=4 - n)];
        }
        Kind::LA => {
            let n = rng.gen_range(1..=2);
            sorts_in = vec![Sort::Real; n];
            sorts_out = vec![Sort::Real; rng.gen_range(1..=3 - n)];
        }
        Kind::Mixed | Kind::Deep => {
            sorts_in = if rng.gen_bool(0.3) {
                vec![Sort::Real, Sort::Bool]
            } else {
                vec![Sort::Real]
            };
            let mut outs = vec![Sort::Real, Sort::Bool];
            if sorts_in.len() == 1 && rng.gen_bool(0.5) {
                outs.push(if rng.gen() { Sort::Real } else { Sort::Bool });
            }
            outs.shuffle(rng);
            sorts_out = outs;
        }
    }
    let inputs: Vec<(String, Sort)> = sorts_in
        .iter()
        .enumerate()
        .map(|(i, s)| (format!("i{i}"), *s))
        .collect();
    let outputs: Vec<(String, Sort)> = sorts_out
        .iter()
        .enumerate()
        .map(|(i, s)| (format!("o{i}"), *s))
        .collect();
    let max_offset = match kind {
        Kind::Deep => 4,
        Kind::Mixed => 2,
        _ => 2,
    };
    let depth = if kind == Kind::Deep { 3 } else { 2 };
    let mut g = SpecGen {
        rng,
        kind,
        inputs: inputs.clone(),
        outputs: outputs.clone(),
        cur: 0,
        max_offset,
    };
    let mut text = String::new();
    for (n, s) in &inputs {
        text.push_str(&format!("input {n}: {s}\n"));
    }
    for (k, (n, s)) in outputs.iter().enumerate() {
        g.cur = k;
        let e = match s {
            Sort::Bool => g.bexpr(depth),
            Sort::Real => g.rexpr(depth),
        };
        text.push_str(&format!("output {n}: {s} := {e}\n"));
    }
    let mut ranges = HashMap::new();
    if kind == Kind::Mixed {
        for (n, s) in &inputs {
            if *s == Sort::Real && g.rng.gen_bool(0.6) {
                let lo = g.rng.gen_range(-3..=0);
                let hi = g.rng.gen_range(1..=4);
                text.push_str(&format!(
                    "assumption {lo} <= {n}[now] && {n}[now] <= {hi}\n"
                ));
                ranges.insert(n.clone(), (lo, hi));
            }
        }
    }
    let spec =
        parse_spec(&text).unwrap_or_else(|e| panic!("generated spec does not parse: {e}\n{text}"));
    Generated { text, spec, ranges }
}

/// Concrete inputs and the readings revealed to the monitor. Each cell is unknown with
/// probability `unknown`; in Mixed specs some known Real cells are revealed as ranges.
pub fn random_trace(
    g: &Generated,
    len: usize,
    unknown: f64,
    ranges_too: bool,
    rng: &mut ChaCha8Rng,
) -> (Vec<HashMap<String, Reading>>, Vec<HashMap<String, Value>>) {
    let mut readings = Vec::with_capacity(len);
    let mut values = Vec::with_capacity(len);
    for _ in 0..len {
        let mut r = HashMap::new();
        let mut v = HashMap::new();
        for d in &g.spec.inputs {
            let val = match d.sort {
                Sort::Bool => Value::Bool(rng.gen()),
                Sort::Real => {
                    let (lo, hi) = g.ranges.get(&d.name).copied().unwrap_or((-3, 3));
                    Value::Real(int(rng.gen_range(lo..=hi)))
                }
            };
            let reading = if rng.gen_bool(unknown) {
                Reading::Unknown
            } else if ranges_too && d.sort == Sort::Real && rng.gen_bool(0.4) {
                let x = val.as_real().unwrap().clone();
                Reading::Range(
                    x.clone() - int(rng.gen_range(0..=2)),
                    x + int(rng.gen_range(0..=2)),
                )
            } else {
                Reading::Exact(val.clone())
            };
            r.insert(d.name.clone(), reading);
            v.insert(d.name.clone(), val);
        }
        readings.push(r);
        values.push(v);
    }
    (readings, values)
}

/// Step emissions (no finalization) and the prune statistics after each step.
pub fn step_all(
    spec: &Specification,
    trace: &[HashMap<String, Reading>],
    config: MonitorConfig,
) -> Result<(Vec<Verdict>, Vec<Option<PruneStats>>), MonitorError> {
    let mut m = Monitor::new(spec, config)?;
    let mut out = Vec::new();
    let mut stats = Vec::new();
    for r in trace {
        out.extend(m.step(r)?);
        stats.push(m.last_prune());
    }
    Ok((out, stats))
}

/// The readings as trace-file text.
pub fn render_trace(spec: &Specification, trace: &[HashMap<String, Reading>]) -> String {
    let header: Vec<String> = spec.inputs.iter().map(|d| d.name.clone()).collect();
    let rows = trace
        .iter()
        .map(|r| {
            header
                .iter()
                .map(|h| r.get(h).cloned().unwrap_or(Reading::Unknown))
                .collect()
        })
        .collect();
    symon::harness::TraceFile { header, rows }.render()
}

pub fn determined(vs: &[Verdict]) -> BTreeSet<(u64, String, String)> {
    vs.iter()
        .filter(|v| v.value.is_determined())
        .map(|v| (v.t, v.stream.clone(), v.value.to_string()))
        .collect()
}

/// Verdicts determined in both runs carry the same value.
pub fn consistent(a: &[Verdict], b: &[Verdict]) -> Result<(), String> {
    let values: HashMap<(u64, &str), String> = b
        .iter()
        .filter(|v| v.value.is_determined())
        .map(|v| ((v.t, v.stream.as_str()), v.value.to_string()))
        .collect();
    for v in a.iter().filter(|v| v.value.is_determined()) {
        if let Some(other) = values.get(&(v.t, v.stream.as_str())) {
            if *other != v.value.to_string() {
                return Err(format!(
                    "{}^{}: {} against reference {other}",
                    v.stream, v.t, v.value
                ));
            }
        }
    }
    Ok(())
}

/// Every determined verdict equals the value of the concrete run.
pub fn agrees_with_run(vs: &[Verdict], truth: &[HashMap<String, Value>]) -> Result<(), String> {
    for v in vs.iter().filter(|v| v.value.is_determined()) {
        let expected = &truth[v.t as usize][&v.stream];
        if !value_matches(&v.value, expected) {
            return Err(format!(
                "{}^{} = {} but the run gives {expected}",
                v.stream, v.t, v.value
            ));
        }
    }
    Ok(())
}

pub fn value_matches(v: &VerdictValue, expected: &Value) -> bool {
    match (v, expected) {
        (VerdictValue::Concrete(a), b) => a == b,
        (VerdictValue::Tri(Some(a)), Value::Bool(b)) => a == b,
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Symbolic expressions

pub fn bvar(i: usize) -> Var {
    Var::stream(i, 0, Sort::Bool)
}

pub fn rvar(i: usize) -> Var {
    Var::stream(100 + i, 0, Sort::Real)
}

pub fn random_lin(rng: &mut ChaCha8Rng, nreal: usize) -> LinExpr {
    let mut e = LinExpr::constant(int(rng.gen_range(-3..=3)));
    for i in 0..nreal {
        if rng.gen_bool(0.6) {
            e.add_term(rvar(i), &int(rng.gen_range(-3..=3)));
        }
    }
    e
}

pub fn random_cmp(rng: &mut ChaCha8Rng) -> CmpOp {
    [CmpOp::Lt, CmpOp::Le, CmpOp::Eq, CmpOp::Ge, CmpOp::Gt][rng.gen_range(0..5)]
}

/// Random formula over `nbool` Bool and `nreal` Real variables.
pub fn random_expr(rng: &mut ChaCha8Rng, nbool: usize, nreal: usize, depth: u32) -> SymExpr {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..10) {
            0 => SymExpr::Const(rng.gen()),
            1..=5 if nbool > 0 => SymExpr::Var(bvar(rng.gen_range(0..nbool))),
            _ if nreal > 0 => {
                let op = random_cmp(rng);
                SymExpr::cmp(&random_lin(rng, nreal), op, &random_lin(rng, nreal))
            }
            _ => SymExpr::Var(bvar(rng.gen_range(0..nbool.max(1)))),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..6) {
        0 => SymExpr::not(random_expr(rng, nbool, nreal, d)),
        1 => SymExpr::and(vec![
            random_expr(rng, nbool, nreal, d),
            random_expr(rng, nbool, nreal, d),
        ]),
        2 => SymExpr::or((0..3).map(|_| random_expr(rng, nbool, nreal, d)).collect()),
        3 => SymExpr::xor(
            random_expr(rng, nbool, nreal, d),
            random_expr(rng, nbool, nreal, d),
        ),
        4 => SymExpr::iff(
            random_expr(rng, nbool, nreal, d),
            random_expr(rng, nbool, nreal, d),
        ),
        _ => SymExpr::ite(
            random_expr(rng, nbool, nreal, d),
            random_expr(rng, nbool, nreal, d),
            random_expr(rng, nbool, nreal, d),
        ),
    }
}

/// Every Bool assignment over `n` variables.
pub fn bool_assignments(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1u64 << n).map(move |m| (0..n).map(|i| m >> i & 1 == 1).collect())
}

pub fn eval_with(e: &SymExpr, bools: &[bool], reals: &[Rational]) -> Option<bool> {
    e.eval(
        &|v: &Var| {
            let i = v.stream_index()?;
            bools.get(i).copied()
        },
        &|v: &Var| {
            let i = v.stream_index()?.checked_sub(100)?;
            reals.get(i).cloned()
        },
    )
}

// ---------------------------------------------------------------------------
// Vertex enumeration

/// Solves the square system `rows · x = rhs` by Cramer's rule; `None` unless the
/// solution is unique.
pub fn solve_square(rows: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let d = det(rows.to_vec());
    if d.is_zero() {
        return None;
    }
    let x = (0..rows.len())
        .map(|i| {
            let replaced: Vec<Vec<Rational>> = rows
                .iter()
                .zip(rhs)
                .map(|(r, b)| {
                    let mut r = r.clone();
                    r[i] = b.clone();
                    r
                })
                .collect();
            det(replaced) / &d
        })
        .collect();
    Some(x)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Range of `x_target` over the bounded polytope `{x | rows·x ≤/= rhs}` (non-strict), from
/// its vertices. `None` if the polytope is empty.
pub fn vertex_range(
    cs: &[Constraint],
    vars: &[Var],
    target: usize,
) -> Option<(Rational, Rational)> {
    let n = vars.len();
    let dense: Vec<(Vec<Rational>, Rational)> = cs
        .iter()
        .map(|c| {
            (
                vars.iter()
                    .map(|v| c.coeffs.get(v).cloned().unwrap_or_else(Rational::zero))
                    .collect(),
                c.rhs.clone(),
            )
        })
        .collect();
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    for s in subsets(dense.len(), n) {
        let rows: Vec<Vec<Rational>> = s.iter().map(|&i| dense[i].0.clone()).collect();
        let rhs: Vec<Rational> = s.iter().map(|&i| dense[i].1.clone()).collect();
        let Some(x) = solve_square(&rows, &rhs) else {
            continue;
        };
        let ok = cs.iter().zip(&dense).all(|(c, (row, b))| {
            let lhs: Rational = row.iter().zip(&x).map(|(a, v)| a * v).sum();
            match c.rel {
                Rel::Le => lhs <= *b,
                Rel::Lt => lhs < *b,
                Rel::Eq => lhs == *b,
            }
        });
        if ok {
            let v = x[target].clone();
            lo = Some(lo.map_or(v.clone(), |l| l.min(v.clone())));
            hi = Some(hi.map_or(v.clone(), |h| h.max(v)));
        }
    }
    Some((lo?, hi?))
}

/// `[lo, hi]` with both ends attained.
pub fn is_closed_range(b: &Bounds, lo: &Rational, hi: &Rational) -> bool {
    *b == Bounds::closed(lo.clone(), hi.clone())
}

// ---------------------------------------------------------------------------
// Dense matrices

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<Vec<Rational>> {
    let zero_col = rng.gen_range(0..=cols);
    (0..rows)
        .map(|_| {
            (0..cols)
                .map(|j| {
                    if j == zero_col || rng.gen_bool(0.3) {
                        Rational::zero()
                    } else {
                        int(rng.gen_range(-3..=3))
                    }
                })
                .collect()
        })
        .collect()
}

/// Rank by the largest nonvanishing minor.
pub fn rank_by_minors(m: &[Vec<Rational>]) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    for k in (1..=rows.min(cols)).rev() {
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let sub: Vec<Vec<Rational>> = rs
                    .iter()
                    .map(|&i| cs.iter().map(|&j| m[i][j].clone()).collect())
                    .collect();
                if !det(sub).is_zero() {
                    return k;
                }
            }
        }
    }
    0
}

fn det(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut d = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        let pv = m[c][c].clone();
        d *= &pv;
        for r in c + 1..n {
            let f = &m[r][c] / &pv;
            if f.is_zero() {
                continue;
            }
            for j in c..n {
                let sub = &f * &m[c][j];
                m[r][j] -= sub;
            }
        }
    }
    d
}

pub fn abs_max(xs: &[Rational]) -> Rational {
    xs.iter()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(Rational::zero)
}
