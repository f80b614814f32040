//! Synthetic traces and the specifications they are paired with.

use super::trace::TraceFile;
use crate::rational::{int, ratio, Rational};
use crate::spec::Value;
use crate::symbolic::Reading;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Window-5 load accumulator with an alarm at 40.
pub const LOAD_SPEC: &str = "\
input ld: Real
output acc := acc[-1|0] + ld[now] - ld[-5|0]
output ok := acc[now] <= 40
";

/// Each load value stays within 10% of the previous one; the virtual predecessor of the
/// first value is 5.
pub const STEP_BOUND: &str = "assumption 0.9 * ld[-1|5] <= ld[now] && ld[now] <= 1.1 * ld[-1|5]";

/// Window-10 running sum with a spike detector.
pub const PEAK_SPEC: &str = "\
input x: Real
output s := s[-1|0] + x[now] - x[-10|0]
output peak := s[now] + 20 < 10 * x[now]
";

pub const XOR_SPEC: &str = "\
input x: Bool
output a := a[-1|ff] ^ x[now]
output b := !a[-1|ff] ^ x[now]
output ok := a[now] ^ b[now]
";

pub const ACC_SPEC: &str = "\
input ld: Real
output acc := acc[-1|0] + ld[now] - ld[-3|0]
";

pub fn load_spec(step_bound: bool) -> String {
    if step_bound {
        format!("{LOAD_SPEC}{STEP_BOUND}\n")
    } else {
        LOAD_SPEC.to_string()
    }
}

/// Random walk in hundredths on [0, 10] starting next to 5. Each value is drawn uniformly
/// from the hundredths within 10% of its predecessor, so the walk satisfies [`STEP_BOUND`].
pub fn load_walk(len: usize, seed: u64) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n: i64 = 500;
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let lo = (9 * n + 9) / 10;
        let hi = (11 * n / 10).min(1000);
        n = rng.gen_range(lo..=hi);
        out.push(ratio(n, 100));
    }
    out
}

/// Baseline values in [1, 3] (tenths) with a spike of 10 every `period` steps.
pub fn peak_signal(len: usize, period: usize, seed: u64) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phase = rng.gen_range(0..period.max(1));
    (0..len)
        .map(|t| {
            if period > 0 && t % period == phase {
                int(10)
            } else {
                ratio(rng.gen_range(10..=30), 10)
            }
        })
        .collect()
}

pub fn real_trace(stream: &str, values: &[Rational]) -> TraceFile {
    TraceFile {
        header: vec![stream.to_string()],
        rows: values
            .iter()
            .map(|v| vec![Reading::Exact(Value::Real(v.clone()))])
            .collect(),
    }
}

/// Every input unknown at every instant.
pub fn unknown_trace(inputs: &[String], len: usize) -> TraceFile {
    TraceFile {
        header: inputs.to_vec(),
        rows: vec![vec![Reading::Unknown; inputs.len()]; len],
    }
}
