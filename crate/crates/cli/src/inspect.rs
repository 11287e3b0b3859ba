//! Summary statistics of an SQAF dataset.

use std::fmt::Write as _;

use serde::Serialize;
use seqaug_core::ModalityDataset;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimStats {
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetStats {
    pub modality: String,
    pub num_sequences: usize,
    pub dim: usize,
    pub min_len: Option<usize>,
    pub mean_len: Option<f64>,
    pub max_len: Option<usize>,
    pub nan_count: u64,
    /// Population mean and standard deviation per feature address over all
    /// non-NaN cells of all sequences. Empty when there are no cells.
    pub per_dim: Vec<DimStats>,
}

/// Two passes with `f64` accumulation.
pub fn dataset_stats(ds: &ModalityDataset) -> DatasetStats {
    let dim = ds.dim();
    let lens: Vec<usize> = ds.sequences().iter().map(|s| s.len()).collect();
    let mut sum = vec![0.0f64; dim];
    let mut count = vec![0u64; dim];
    let mut nan_count = 0u64;
    for seq in ds.sequences() {
        for row in seq.rows() {
            for (a, &v) in row.iter().enumerate() {
                if v.is_nan() {
                    nan_count += 1;
                } else {
                    sum[a] += v as f64;
                    count[a] += 1;
                }
            }
        }
    }
    let total_cells: usize = lens.iter().sum::<usize>() * dim;
    let per_dim = if total_cells == 0 {
        Vec::new()
    } else {
        let mean: Vec<f64> = sum
            .iter()
            .zip(&count)
            .map(|(&s, &n)| if n == 0 { f64::NAN } else { s / n as f64 })
            .collect();
        let mut sq = vec![0.0f64; dim];
        for seq in ds.sequences() {
            for row in seq.rows() {
                for (a, &v) in row.iter().enumerate() {
                    if !v.is_nan() {
                        let d = v as f64 - mean[a];
                        sq[a] += d * d;
                    }
                }
            }
        }
        mean.iter()
            .zip(sq.iter().zip(&count))
            .map(|(&mean, (&sq, &n))| DimStats {
                mean,
                std: if n == 0 { f64::NAN } else { (sq / n as f64).sqrt() },
            })
            .collect()
    };
    DatasetStats {
        modality: ds.modality_name().to_owned(),
        num_sequences: ds.len(),
        dim,
        min_len: lens.iter().min().copied(),
        mean_len: (!lens.is_empty()).then(|| lens.iter().sum::<usize>() as f64 / lens.len() as f64),
        max_len: lens.iter().max().copied(),
        nan_count,
        per_dim,
    }
}

pub fn render_text(stats: &DatasetStats) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "modality:      {}", stats.modality);
    let _ = writeln!(out, "sequences:     {}", stats.num_sequences);
    let _ = writeln!(out, "dim:           {}", stats.dim);
    if let (Some(min), Some(mean), Some(max)) = (stats.min_len, stats.mean_len, stats.max_len) {
        let _ = writeln!(out, "length:        min {min} / mean {mean:.3} / max {max}");
    }
    let _ = writeln!(out, "nan cells:     {}", stats.nan_count);
    if !stats.per_dim.is_empty() {
        let _ = writeln!(out, "{:>6} {:>16} {:>16}", "addr", "mean", "std");
        for (a, d) in stats.per_dim.iter().enumerate() {
            let _ = writeln!(out, "{a:>6} {:>16.8e} {:>16.8e}", d.mean, d.std);
        }
    }
    out
}

/// JSON form. Non-finite statistics are written as `null`.
pub fn render_json(stats: &DatasetStats) -> String {
    serde_json::to_string_pretty(stats).expect("stats serialize")
}
