//! Per-event time and peak memory over synthetic traces of growing length.

use super::synth::unknown_trace;
use crate::monitor::{run, MonitorConfig, MonitorError, Pruning};
use crate::spec::Specification;
use std::fmt::Write;
use std::time::Instant;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub length: usize,
    pub mean_event_micros: f64,
    pub max_measure: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// All lengths reached the same maximum measure.
    pub flat: bool,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("length,mean_event_us,max_measure\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{:.1},{}",
                r.length, r.mean_event_micros, r.max_measure
            )
            .unwrap();
        }
        out
    }
}

/// Runs `spec` on all-unknown traces of each length. With pruning on, a non-flat memory
/// profile is reported as an invariant violation.
pub fn bench(
    spec: &Specification,
    lengths: &[usize],
    config: MonitorConfig,
) -> Result<BenchReport, MonitorError> {
    let inputs: Vec<String> = spec.inputs.iter().map(|d| d.name.clone()).collect();
    let mut rows = Vec::with_capacity(lengths.len());
    for &length in lengths {
        let trace = unknown_trace(&inputs, length)
            .readings_for(spec)
            .expect("generated trace");
        let start = Instant::now();
        let res = run(spec, &trace, config.clone())?;
        rows.push(BenchRow {
            length,
            mean_event_micros: start.elapsed().as_secs_f64() * 1e6 / length.max(1) as f64,
            max_measure: res.measures.iter().copied().max().unwrap_or(0),
        });
    }
    let flat = rows
        .windows(2)
        .all(|w| w[0].max_measure == w[1].max_measure);
    if config.pruning == Pruning::EveryStep && !flat {
        let series: Vec<String> = rows
            .iter()
            .map(|r| format!("{}:{}", r.length, r.max_measure))
            .collect();
        return Err(MonitorError::Invariant(format!(
            "memory grows with trace length ({})",
            series.join(", ")
        )));
    }
    Ok(BenchReport { rows, flat })
}
