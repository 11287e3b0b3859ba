//! Throughput measurement on synthetic data and a length sweep that fits
//! the growth exponent of run time against sequence length.

use std::hint::black_box;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use seqaug_core::{augment_sequence, derive_stream, fraction_to_count, FeatureSequence, SelectionDistribution};

use crate::augment::thread_pool;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchParams {
    pub dim: usize,
    pub len: usize,
    pub num: usize,
    pub p: f64,
    pub threads: usize,
    pub seed: u64,
    pub repeats: usize,
}

impl BenchParams {
    fn check(&self) -> Result<()> {
        if self.dim == 0 || self.len == 0 || self.num == 0 || self.repeats == 0 {
            return Err(CliError::Validation("--dim, --len, --num and --repeats must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(CliError::Validation(format!("--p {} out of [0, 1]", self.p)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchResult {
    pub params: BenchParams,
    /// Best of `repeats` runs over all `num` sequences.
    pub seconds: f64,
    pub sequences_per_sec: f64,
    pub selected_addresses: usize,
    /// Time per moved cell (timestep x selected address); absent when
    /// nothing is selected.
    pub ns_per_moved_cell: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub points: Vec<BenchResult>,
    /// Least-squares slope of ln(time) against ln(len).
    pub exponent: f64,
}

/// `num` sequences of uniform values in `[-1, 1)`; sequence `i` is drawn
/// from stream `(seed, i, u64::MAX, 0)` so it never overlaps augmentation
/// streams.
pub fn synthetic_sequences(dim: usize, len: usize, num: usize, seed: u64) -> Vec<FeatureSequence> {
    (0..num)
        .map(|i| {
            let mut rng = derive_stream(seed, i as u64, u64::MAX, 0);
            let data = (0..dim * len)
                .map(|_| (rng.next_u64() >> 40) as f32 / (1u64 << 23) as f32 - 1.0)
                .collect();
            FeatureSequence::new(format!("syn-{i}"), dim, data).expect("whole rows")
        })
        .collect()
}

fn run_once(seqs: &[FeatureSequence], dist: &SelectionDistribution, seed: u64) -> Duration {
    let start = Instant::now();
    let checksum: u64 = seqs
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let (out, _) = augment_sequence(s, dist, &mut derive_stream(seed, i as u64, 0, 0)).expect("valid plan");
            out.data().first().map_or(0, |v| v.to_bits() as u64)
        })
        .sum();
    black_box(checksum);
    start.elapsed()
}

pub fn measure(params: &BenchParams) -> Result<BenchResult> {
    params.check()?;
    let seqs = synthetic_sequences(params.dim, params.len, params.num, params.seed);
    let dist = SelectionDistribution::Fixed { p: params.p };
    let pool = thread_pool(params.threads)?;
    let best = pool.install(|| {
        (0..params.repeats)
            .map(|_| run_once(&seqs, &dist, params.seed))
            .min()
            .unwrap()
    });
    drop(seqs);
    let seconds = best.as_secs_f64();
    let selected = fraction_to_count(params.p, params.dim);
    let moved = (params.len * selected * params.num) as f64;
    Ok(BenchResult {
        params: *params,
        seconds,
        sequences_per_sec: params.num as f64 / seconds,
        selected_addresses: selected,
        ns_per_moved_cell: (moved > 0.0).then(|| seconds * 1e9 / moved),
    })
}

/// Measures at `len, 2*len, ...` (`steps` points) and fits the exponent.
pub fn sweep(params: &BenchParams, steps: usize) -> Result<SweepResult> {
    if steps < 2 {
        return Err(CliError::Validation("a sweep needs at least 2 steps".into()));
    }
    let points = (0..steps)
        .map(|i| {
            measure(&BenchParams {
                len: params.len << i,
                ..*params
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let xy: Vec<(f64, f64)> = points.iter().map(|r| (r.params.len as f64, r.seconds)).collect();
    Ok(SweepResult {
        exponent: fit_exponent(&xy),
        points,
    })
}

/// Slope of the least-squares line through `(ln x, ln y)`.
pub fn fit_exponent(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
