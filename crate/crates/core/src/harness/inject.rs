//! Seeded uncertainty injection. The generator is ChaCha8, so outputs are identical across
//! platforms for a given seed.

use super::trace::TraceFile;
use crate::rational::{one, zero, Rational};
use crate::spec::Value;
use crate::symbolic::Reading;
use log::warn;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InjectError {
    #[error("fraction and width must lie in [0, 1]")]
    OutOfRange,
    #[error("burst length bounds {0}..{1} are empty or zero")]
    BurstLength(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InjectionPlan {
    /// Replaces `⌊fraction·N⌋` exact Real cells `v` by `[v·(1−width), v·(1+width)]`.
    Perturb {
        fraction: Rational,
        width: Rational,
        seed: u64,
    },
    /// Blanks `count` windows of whole rows, each of length in `min_len..=max_len`.
    Bursts {
        count: usize,
        min_len: usize,
        max_len: usize,
        seed: u64,
    },
    /// Replaces `⌊fraction·N⌋` cells of any sort by `?`.
    Unknowns { fraction: Rational, seed: u64 },
}

fn unit(r: &Rational) -> Result<(), InjectError> {
    if *r < zero() || *r > one() {
        Err(InjectError::OutOfRange)
    } else {
        Ok(())
    }
}

fn share(fraction: &Rational, n: usize) -> usize {
    (fraction * Rational::from_integer(n.into()))
        .floor()
        .to_integer()
        .to_usize()
        .unwrap_or(n)
        .min(n)
}

pub fn inject(trace: &TraceFile, plan: &InjectionPlan) -> Result<TraceFile, InjectError> {
    let mut out = trace.clone();
    match plan {
        InjectionPlan::Perturb {
            fraction,
            width,
            seed,
        } => {
            unit(fraction)?;
            unit(width)?;
            let mut cells = Vec::new();
            let mut skipped = 0usize;
            for (i, row) in trace.rows.iter().enumerate() {
                for (j, r) in row.iter().enumerate() {
                    match r {
                        Reading::Exact(Value::Real(_)) => cells.push((i, j)),
                        Reading::Exact(Value::Bool(_)) => skipped += 1,
                        _ => {}
                    }
                }
            }
            if skipped > 0 && *fraction > zero() {
                warn!("perturbation skips {skipped} Bool cells");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let k = share(fraction, cells.len());
            for idx in sample(&mut rng, cells.len(), k) {
                let (i, j) = cells[idx];
                if let Reading::Exact(Value::Real(v)) = &trace.rows[i][j] {
                    let a = v * (one() - width);
                    let b = v * (one() + width);
                    out.rows[i][j] = Reading::Range(a.clone().min(b.clone()), a.max(b));
                }
            }
        }
        InjectionPlan::Bursts {
            count,
            min_len,
            max_len,
            seed,
        } => {
            if *min_len == 0 || min_len > max_len {
                return Err(InjectError::BurstLength(*min_len, *max_len));
            }
            let n = trace.rows.len();
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for (start, len) in burst_windows(n, *count, *min_len, *max_len, &mut rng) {
                for row in &mut out.rows[start..start + len] {
                    row.fill(Reading::Unknown);
                }
            }
        }
        InjectionPlan::Unknowns { fraction, seed } => {
            unit(fraction)?;
            let width = trace.header.len();
            let total = trace.rows.len() * width;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for idx in sample(&mut rng, total, share(fraction, total)) {
                let (i, j) = idx.div_rem(&width);
                out.rows[i][j] = Reading::Unknown;
            }
        }
    }
    Ok(out)
}

/// Start and length of each burst. Windows are placed in disjoint equal slots of the trace
/// when they fit, so consecutive bursts do not merge; otherwise anywhere.
pub fn burst_windows(
    n: usize,
    count: usize,
    min_len: usize,
    max_len: usize,
    rng: &mut impl Rng,
) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(count);
    if n == 0 || count == 0 {
        return out;
    }
    let slot = n / count;
    for i in 0..count {
        let len = rng.gen_range(min_len..=max_len).min(n);
        let (base, room) = if slot >= len {
            (i * slot, slot - len)
        } else {
            (0, n - len)
        };
        out.push((base + rng.gen_range(0..=room), len));
    }
    out
}
