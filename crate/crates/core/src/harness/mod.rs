//! Trace files, uncertainty injection, synthetic workloads and reports.

pub mod bench;
pub mod compare;
pub mod inject;
pub mod synth;
pub mod trace;

pub use bench::{bench, BenchReport, BenchRow};
pub use compare::{compare, CompareReport, Disagreement, StreamCounts};
pub use inject::{inject, InjectError, InjectionPlan};
pub use trace::{load_trace, parse_trace, TraceError, TraceFile};
