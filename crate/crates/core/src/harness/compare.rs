//! Side-by-side run of the symbolic and interval monitors.

use crate::interval::{run_abs, AbsVal};
use crate::monitor::{run, MonitorConfig, MonitorError, VerdictValue};
use crate::spec::{Specification, Value};
use crate::symbolic::Reading;
use std::collections::HashMap;
use std::fmt::Write;
use std::time::Instant;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StreamCounts {
    pub stream: String,
    pub sym_determined: usize,
    pub sym_undetermined: usize,
    pub abs_determined: usize,
    pub abs_undetermined: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disagreement {
    pub t: u64,
    pub stream: String,
    pub symbolic: String,
    pub interval: String,
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub streams: Vec<StreamCounts>,
    pub disagreements: Vec<Disagreement>,
    pub max_measure: usize,
    pub mean_event_micros: f64,
    /// Determination per `(stream, t)` for both monitors, in emission order.
    pub determined: Vec<(String, u64, bool, bool)>,
}

fn agrees(sym: &VerdictValue, abs: &AbsVal) -> bool {
    match (sym, abs) {
        (VerdictValue::Concrete(Value::Real(r)), AbsVal::Interval(i)) => i.as_point() == Some(r),
        (
            VerdictValue::Concrete(Value::Bool(b)) | VerdictValue::Tri(Some(b)),
            AbsVal::Bool3(Some(c)),
        ) => b == c,
        _ => false,
    }
}

pub fn compare(
    spec: &Specification,
    trace: &[HashMap<String, Reading>],
    config: MonitorConfig,
) -> Result<CompareReport, MonitorError> {
    let start = Instant::now();
    let sym = run(spec, trace, config)?;
    let elapsed = start.elapsed();
    let abs = run_abs(spec, trace)?;

    let mut streams: Vec<StreamCounts> = spec
        .outputs
        .iter()
        .map(|d| StreamCounts {
            stream: d.name.clone(),
            ..Default::default()
        })
        .collect();
    let mut disagreements = Vec::new();
    let mut determined = Vec::with_capacity(abs.len());
    for a in &abs {
        let s = sym.verdict(&a.stream, a.t).ok_or_else(|| {
            MonitorError::Invariant(format!("no verdict for {}^{}", a.stream, a.t))
        })?;
        let row = streams
            .iter_mut()
            .find(|c| c.stream == a.stream)
            .expect("output stream");
        let (sd, ad) = (s.is_determined(), a.value.is_determined());
        if sd {
            row.sym_determined += 1;
        } else {
            row.sym_undetermined += 1;
        }
        if ad {
            row.abs_determined += 1;
        } else {
            row.abs_undetermined += 1;
        }
        if sd && ad && !agrees(s, &a.value) {
            disagreements.push(Disagreement {
                t: a.t,
                stream: a.stream.clone(),
                symbolic: s.to_string(),
                interval: a.value.to_string(),
            });
        }
        determined.push((a.stream.clone(), a.t, sd, ad));
    }
    let events = trace.len().max(1) as f64;
    Ok(CompareReport {
        streams,
        disagreements,
        max_measure: sym.measures.iter().copied().max().unwrap_or(0),
        mean_event_micros: elapsed.as_secs_f64() * 1e6 / events,
        determined,
    })
}

impl CompareReport {
    /// Counts table, then a blank line and `metric,value` rows, then disagreements.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "stream,sym_determined,sym_undetermined,abs_determined,abs_undetermined\n",
        );
        for s in &self.streams {
            writeln!(
                out,
                "{},{},{},{},{}",
                s.stream,
                s.sym_determined,
                s.sym_undetermined,
                s.abs_determined,
                s.abs_undetermined
            )
            .unwrap();
        }
        out.push_str("\nmetric,value\n");
        writeln!(out, "disagreements,{}", self.disagreements.len()).unwrap();
        writeln!(out, "max_measure,{}", self.max_measure).unwrap();
        writeln!(out, "mean_event_us,{:.1}", self.mean_event_micros).unwrap();
        if !self.disagreements.is_empty() {
            out.push_str("\nt,stream,symbolic,interval\n");
            for d in &self.disagreements {
                writeln!(out, "{},{},{},{}", d.t, d.stream, d.symbolic, d.interval).unwrap();
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::spec::parse_spec;

    const WINDOW3: &str =
        "input ld: Real\noutput acc := acc[-1|0] + ld[now] - ld[-3|0]\noutput ok := acc[now] <= 15";

    fn trace(first: Reading) -> Vec<HashMap<String, Reading>> {
        std::iter::once(first)
            .chain([4, 5, 7].map(|v| Reading::Exact(Value::Real(int(v)))))
            .map(|r| HashMap::from([("ld".to_string(), r)]))
            .collect()
    }

    #[test]
    fn symbolic_determines_more() {
        let spec = parse_spec(WINDOW3).unwrap();
        let rep = compare(
            &spec,
            &trace(Reading::Range(int(1), int(5))),
            MonitorConfig::default(),
        )
        .unwrap();
        assert!(rep.disagreements.is_empty());
        let ok = rep.streams.iter().find(|s| s.stream == "ok").unwrap();
        assert_eq!((ok.sym_determined, ok.abs_determined), (4, 3));
        assert!(rep.determined.contains(&("ok".into(), 3, true, false)));
        assert!(rep.to_csv().starts_with("stream,sym_determined"));
    }

    #[test]
    fn known_trace_agrees_everywhere() {
        let spec = parse_spec(WINDOW3).unwrap();
        let rep = compare(
            &spec,
            &trace(Reading::Exact(Value::Real(int(3)))),
            MonitorConfig::default(),
        )
        .unwrap();
        assert!(rep.disagreements.is_empty());
        assert!(rep.determined.iter().all(|(_, _, s, a)| *s && *a));
    }
}
