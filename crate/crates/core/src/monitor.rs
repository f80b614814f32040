//! The online loop: instantiate, ingest readings, simplify, emit verdicts, prune.

use crate::pruning::{prune_boolean, prune_linear, prune_mixed, PruneError, PruneResult, Quality};
use crate::rational::fmt_exact;
use crate::solver::{bounds_of, check_predicate, Bounds, Caps, SolverError, Validity};
use crate::spec::{classify_fragment, normalize, Fragment, Sort, SpecError, Specification, Value};
use crate::symbolic::{
    CmpOp, ConstraintSet, FreshGen, Instantiator, Names, Reading, Subst, SymError, SymExpr, Var,
};
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonitorError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Reading(#[from] SymError),
    #[error("lookback {given} is below the {required} required by the assumptions")]
    Lookback { required: usize, given: usize },
    #[error("specification is outside the supported fragments")]
    Unsupported,
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl From<PruneError> for MonitorError {
    fn from(e: PruneError) -> Self {
        match e {
            PruneError::Solver(s) => MonitorError::Solver(s),
            other => MonitorError::Invariant(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pruning {
    Off,
    EveryStep,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonitorConfig {
    pub pruning: Pruning,
    /// Instants kept relevant behind the current one; `None` uses what the assumptions need.
    pub lookback: Option<usize>,
    pub caps: Caps,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        MonitorConfig {
            pruning: Pruning::EveryStep,
            lookback: None,
            caps: Caps::default(),
        }
    }
}

impl MonitorConfig {
    pub fn reference() -> Self {
        MonitorConfig {
            pruning: Pruning::Off,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerdictValue {
    Concrete(Value),
    Tri(Option<bool>),
    Bounds(Bounds),
    Residual(String),
}

impl VerdictValue {
    pub fn is_determined(&self) -> bool {
        matches!(self, VerdictValue::Concrete(_) | VerdictValue::Tri(Some(_)))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            VerdictValue::Concrete(_) => "val",
            VerdictValue::Tri(_) => "tri",
            VerdictValue::Bounds(_) => "bounds",
            VerdictValue::Residual(_) => "residual",
        }
    }
}

impl fmt::Display for VerdictValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerdictValue::Concrete(Value::Real(r)) => f.write_str(&fmt_exact(r)),
            VerdictValue::Concrete(Value::Bool(b)) | VerdictValue::Tri(Some(b)) => {
                f.write_str(if *b { "tt" } else { "ff" })
            }
            VerdictValue::Tri(None) => f.write_str("?"),
            VerdictValue::Bounds(b) => write!(f, "{b}"),
            VerdictValue::Residual(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub t: u64,
    pub stream: String,
    pub value: VerdictValue,
    /// Emitted by finalization, upgrading an earlier undetermined verdict.
    pub revised: bool,
}

impl Verdict {
    /// Tab-separated `t stream kind payload`.
    pub fn record(&self) -> String {
        if self.revised {
            format!(
                "{}\t{}\trevised\t{} {}",
                self.t,
                self.stream,
                self.value.kind(),
                self.value
            )
        } else {
            format!(
                "{}\t{}\t{}\t{}",
                self.t,
                self.stream,
                self.value.kind(),
                self.value
            )
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub verdicts: Vec<Verdict>,
    /// `measure(live)` after each step.
    pub measures: Vec<usize>,
}

impl RunResult {
    /// Verdict for `stream` at `t`, preferring a revision over the original emission.
    pub fn verdict(&self, stream: &str, t: u64) -> Option<&VerdictValue> {
        let mut found = None;
        for v in &self.verdicts {
            if v.t == t && v.stream == stream {
                found = Some(&v.value);
            }
        }
        found
    }
}

pub fn memory_profile(result: &RunResult) -> &[usize] {
    &result.measures
}

pub struct Monitor {
    spec: Specification,
    inst: Instantiator,
    fragment: Fragment,
    config: MonitorConfig,
    lookback: usize,
    live: ConstraintSet,
    t: u64,
    fresh: FreshGen,
    /// Original outputs with their index in the normalized spec.
    outputs: Vec<(String, usize, Sort)>,
    inputs: Vec<String>,
    pending: Vec<(u64, String, Var)>,
    last_prune: Option<PruneStats>,
}

/// Size of the most recent prune: relevant variables kept and the resulting measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PruneStats {
    pub relevant: usize,
    pub measure: usize,
    pub quality: Quality,
}

impl Monitor {
    pub fn new(spec: &Specification, config: MonitorConfig) -> Result<Monitor, MonitorError> {
        let fragment = classify_fragment(spec);
        if fragment == Fragment::Unsupported {
            return Err(MonitorError::Unsupported);
        }
        let norm = normalize(spec)?;
        let required = spec.lookback;
        let lookback = match config.lookback {
            Some(l) if l < required => {
                return Err(MonitorError::Lookback { required, given: l });
            }
            Some(l) => l,
            None => required,
        };
        let inst = Instantiator::new(&norm);
        let outputs = spec
            .outputs
            .iter()
            .map(|d| {
                (
                    d.name.clone(),
                    norm.stream_index(&d.name).expect("output survives"),
                    d.sort,
                )
            })
            .collect();
        let inputs = spec.inputs.iter().map(|d| d.name.clone()).collect();
        Ok(Monitor {
            spec: norm,
            inst,
            fragment,
            config,
            lookback,
            live: ConstraintSet::new(),
            t: 0,
            fresh: FreshGen::new(),
            outputs,
            inputs,
            pending: Vec::new(),
            last_prune: None,
        })
    }

    pub fn fragment(&self) -> Fragment {
        self.fragment
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn live(&self) -> &ConstraintSet {
        &self.live
    }

    pub fn names(&self) -> &Names {
        self.inst.names()
    }

    pub fn measure(&self) -> usize {
        self.live.measure()
    }

    pub fn last_prune(&self) -> Option<PruneStats> {
        self.last_prune
    }

    /// Processes one instant. Inputs missing from `readings` are unknown.
    pub fn step(
        &mut self,
        readings: &HashMap<String, Reading>,
    ) -> Result<Vec<Verdict>, MonitorError> {
        self.step_with(readings, self.config.pruning == Pruning::EveryStep)
    }

    fn step_with(
        &mut self,
        readings: &HashMap<String, Reading>,
        prune: bool,
    ) -> Result<Vec<Verdict>, MonitorError> {
        let t = self.t;
        for name in readings.keys() {
            if !self.inputs.contains(name) {
                return Err(match self.spec.stream(name) {
                    Some(_) => SymError::NotAnInput(name.clone()),
                    None => SymError::UnknownStream(name.clone()),
                }
                .into());
            }
        }
        self.live.extend(self.inst.step_equations(&self.spec, t)?);
        self.live.extend(self.inst.assumptions(&self.spec, t)?);
        for (name, r) in readings {
            self.live.extend(self.inst.reading(name, t, r)?);
        }
        self.live = ground_pass(std::mem::take(&mut self.live));

        let mut verdicts = Vec::with_capacity(self.outputs.len());
        for (name, idx, sort) in self.outputs.clone() {
            let v = Var::stream(idx, t, sort);
            let value = self.query(v)?;
            if !value.is_determined() {
                self.pending.push((t, name.clone(), v));
            }
            verdicts.push(Verdict {
                t,
                stream: name,
                value,
                revised: false,
            });
        }
        if prune {
            self.prune(t)?;
        }
        self.t += 1;
        Ok(verdicts)
    }

    fn query(&self, v: Var) -> Result<VerdictValue, MonitorError> {
        let cs = self.live.to_vec();
        let caps = &self.config.caps;
        Ok(match v.sort {
            Sort::Bool => match check_predicate(&cs, &SymExpr::Var(v), caps)? {
                Validity::Valid => VerdictValue::Tri(Some(true)),
                Validity::Unsat => VerdictValue::Tri(Some(false)),
                Validity::Contingent => VerdictValue::Tri(None),
            },
            Sort::Real => {
                let b = bounds_of(&cs, v, caps)?;
                match &b {
                    _ if b.point().is_some() => {
                        VerdictValue::Concrete(Value::Real(b.point().unwrap().clone()))
                    }
                    Bounds::Range {
                        lo: Some(_),
                        hi: Some(_),
                    } => VerdictValue::Bounds(b),
                    _ => VerdictValue::Residual(self.residual(v)),
                }
            }
        })
    }

    fn residual(&self, v: Var) -> String {
        let names = self.inst.names();
        let parts: Vec<String> = self
            .live
            .iter()
            .filter(|c| c.vars().contains(&v))
            .map(|c| c.display(names).to_string())
            .collect();
        if parts.is_empty() {
            "tt".to_string()
        } else {
            parts.join(" && ")
        }
    }

    /// Instant variables that later steps may still mention.
    fn frontier(&self, t: u64) -> Vec<Var> {
        let depth = self.lookback.max(1) as u64;
        let first = (t + 1).saturating_sub(depth);
        let mut r: Vec<Var> = self
            .live
            .vars()
            .into_iter()
            .filter(|v| v.instant().is_some_and(|i| i >= first && i <= t))
            .collect();
        r.sort();
        r
    }

    fn prune(&mut self, t: u64) -> Result<(), MonitorError> {
        let r = self.frontier(t);
        let caps = &self.config.caps;
        let vars: BTreeSet<Var> = self.live.vars();
        let res: PruneResult = if vars.iter().all(|v| v.sort == Sort::Bool) {
            prune_boolean(&self.live, &r, &mut self.fresh, caps)?
        } else if self
            .live
            .iter()
            .all(|c| matches!(c, SymExpr::Atom(a) if a.op == CmpOp::Eq))
        {
            prune_linear(&self.live, &r, &mut self.fresh)?
        } else {
            prune_mixed(&self.live, &r, &mut self.fresh, caps)?
        };
        log::trace!(
            "t={t} pruned {} -> {}",
            self.live.measure(),
            res.constraints.measure()
        );
        self.last_prune = Some(PruneStats {
            relevant: r.len(),
            measure: res.constraints.measure(),
            quality: res.quality,
        });
        self.live = res.constraints;
        Ok(())
    }

    /// Re-queries undetermined verdicts whose variables are still live.
    pub fn finalize(&self) -> Result<Vec<Verdict>, MonitorError> {
        let vars = self.live.vars();
        let mut out = Vec::new();
        for (t, stream, v) in &self.pending {
            if !vars.contains(v) {
                continue;
            }
            let value = self.query(*v)?;
            if value.is_determined() {
                out.push(Verdict {
                    t: *t,
                    stream: stream.clone(),
                    value,
                    revised: true,
                });
            }
        }
        Ok(out)
    }
}

/// Substitutes single-variable bindings into every other constraint until nothing changes.
/// The bindings themselves are kept.
fn ground_pass(mut live: ConstraintSet) -> ConstraintSet {
    loop {
        let mut s = Subst::new();
        for c in live.iter() {
            match c {
                SymExpr::Var(v) => {
                    s.bools.insert(*v, SymExpr::tt());
                }
                SymExpr::Not(x) => {
                    if let SymExpr::Var(v) = &**x {
                        s.bools.insert(*v, SymExpr::ff());
                    }
                }
                SymExpr::Atom(a) if a.op == CmpOp::Eq && a.lhs.len() == 1 => {
                    let (v, c) = a.lhs.iter().next().unwrap();
                    s.reals
                        .insert(*v, crate::symbolic::LinExpr::constant(&a.rhs / c));
                }
                _ => {}
            }
        }
        if s.is_empty() {
            return live;
        }
        let mut next = ConstraintSet::new();
        let mut changed = false;
        for c in live.iter() {
            let binding = match c {
                SymExpr::Var(_) => true,
                SymExpr::Not(x) => matches!(&**x, SymExpr::Var(_)),
                SymExpr::Atom(a) => a.op == CmpOp::Eq && a.lhs.len() == 1,
                _ => false,
            };
            if binding {
                next.insert_raw(c.clone());
                continue;
            }
            let d = c.apply(&s);
            if d != *c {
                changed = true;
            }
            next.insert_simplified(d);
        }
        live = next;
        if !changed {
            return live;
        }
    }
}

/// Runs `spec` over `trace` (one reading map per instant) and finalizes.
pub fn run(
    spec: &Specification,
    trace: &[HashMap<String, Reading>],
    config: MonitorConfig,
) -> Result<RunResult, MonitorError> {
    let mut m = Monitor::new(spec, config)?;
    let prune = m.config.pruning == Pruning::EveryStep;
    let mut verdicts = Vec::new();
    let mut measures = Vec::with_capacity(trace.len());
    for (i, readings) in trace.iter().enumerate() {
        let last = i + 1 == trace.len();
        verdicts.extend(m.step_with(readings, prune && !last)?);
        if last {
            verdicts.extend(m.finalize()?);
            if prune {
                m.prune(m.t - 1)?;
            }
        }
        measures.push(m.measure());
    }
    Ok(RunResult { verdicts, measures })
}
