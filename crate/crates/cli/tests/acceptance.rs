//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. An optional positional argument filters criteria by
//! substring.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

mod common;

use std::collections::HashMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use common::*;
use seqaug_cli::bench::{self, BenchParams};
use seqaug_core::io::{import_csv, read_plan_log, read_sqaf_bytes, write_sqaf};
use seqaug_core::{
    apply_plan, augment_sample, derive_stream, draw_fraction, sample_addresses, sample_permutation, AugmentConfig,
    AugmentPlan, FeatureSequence, Mode, ModalityConfig, ModalityDataset, MultimodalSample, RngStream,
    SelectionDistribution,
};

type Criterion = (&'static str, fn() -> Result<String, String>);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    ensure!(elapsed < limit, "{what} took {elapsed:?}, limit {limit:?}");
    Ok(())
}

// ---------------------------------------------------------------------------

fn worked_example() -> Result<String, String> {
    let start = Instant::now();
    let dim = 5;
    let data: Vec<f32> = (0..6 * dim).map(|v| v as f32 * 0.5 - 3.0).collect();
    let seq = FeatureSequence::new("fig", dim, data).unwrap();
    let pi = vec![2, 5, 4, 1, 0, 3];
    let plan = AugmentPlan::new(0.2, vec![2], pi.clone()).map_err(|e| e.to_string())?;
    let out = apply_plan(&seq, &plan).map_err(|e| e.to_string())?;
    for t in 0..6 {
        for a in 0..dim {
            let want = if a == 2 { seq.value(pi[t], a) } else { seq.value(t, a) };
            ensure!(
                out.value(t, a).to_bits() == want.to_bits(),
                "out[{t}][{a}] = {} expected {want}",
                out.value(t, a)
            );
        }
    }
    within(start.elapsed(), Duration::from_secs(1), "worked example")?;
    Ok("column 2 follows pi=(2,5,4,1,0,3), other columns bit-identical".into())
}

// ---------------------------------------------------------------------------

fn column_major_bits(seq: &FeatureSequence) -> Vec<Vec<u32>> {
    let mut cols = vec![Vec::with_capacity(seq.len()); seq.dim()];
    for row in seq.rows() {
        for (a, v) in row.iter().enumerate() {
            cols[a].push(v.to_bits());
        }
    }
    cols
}

fn random_dist(rng: &mut RngStream) -> SelectionDistribution {
    let unit = |rng: &mut RngStream| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    match rng.bounded_uniform(4) {
        0 => SelectionDistribution::Beta { alpha: 0.05 + unit(rng) * 1.95 },
        1 => SelectionDistribution::FoldedNormal { mu: unit(rng), sigma: 0.001 + unit(rng) * 0.3 },
        2 => SelectionDistribution::Fixed { p: unit(rng) },
        _ => SelectionDistribution::Fixed { p: 0.0 },
    }
}

fn multiset_identity_suite() -> Result<String, String> {
    let start = Instant::now();
    let mut driver = derive_stream(0x5eed, 0, 0, 0);
    let mut stats = HashMap::<&str, usize>::new();
    for case in 0..10_000u64 {
        let len = match case % 50 {
            0 => 0,
            1 => 1,
            _ => driver.bounded_uniform(513) as usize,
        };
        let dim = 1 + driver.bounded_uniform(512) as usize;
        let data: Vec<f32> = (0..len * dim).map(|_| f32::from_bits(driver.next_u64() as u32)).collect();
        let seq = FeatureSequence::new(format!("c{case}"), dim, data).unwrap();
        let dist = random_dist(&mut driver);
        let mode = if case % 10 == 9 { Mode::Inference } else { Mode::Train };
        let cfg = AugmentConfig {
            mode,
            master_seed: driver.next_u64(),
            copies: 1,
            modalities: vec![ModalityConfig::new("m", dist)],
        };
        let sample = MultimodalSample::new("s").with_stream("m", seq.clone());
        let (out, log) = augment_sample(&sample, &cfg, case, 0).map_err(|e| format!("case {case}: {e}"))?;
        let out = &out.streams["m"];

        if mode == Mode::Inference {
            ensure!(out == &seq && log.is_empty(), "case {case}: inference output differs");
            *stats.entry("inference").or_default() += 1;
            continue;
        }
        let plan = &log[0].plan;
        if len <= 1 {
            ensure!(out == &seq, "case {case}: T={len} output not identical");
            *stats.entry("short").or_default() += 1;
        }
        if dist == (SelectionDistribution::Fixed { p: 0.0 }) {
            ensure!(out == &seq && plan.addresses().is_empty(), "case {case}: p=0 output not identical");
            *stats.entry("p0").or_default() += 1;
        }
        let before = column_major_bits(&seq);
        let after = column_major_bits(out);
        let mut selected = vec![false; dim];
        for &a in plan.addresses() {
            selected[a] = true;
        }
        for a in 0..dim {
            if selected[a] {
                let mut x = before[a].clone();
                let mut y = after[a].clone();
                x.sort_unstable();
                y.sort_unstable();
                ensure!(x == y, "case {case}: multiset of selected column {a} changed");
            } else {
                ensure!(before[a] == after[a], "case {case}: unselected column {a} changed");
            }
        }
        *stats.entry("train").or_default() += 1;
    }
    within(start.elapsed(), Duration::from_secs(60), "multiset suite")?;
    Ok(format!(
        "10000 cases (train {}, inference {}, T<=1 {}, p=0 {}), zero failures",
        stats["train"], stats["inference"], stats["short"], stats["p0"]
    ))
}

// ---------------------------------------------------------------------------

fn moments(dist: SelectionDistribution, salt: u64) -> Result<(f64, f64), String> {
    const N: u64 = 100_000;
    let mut sum = 0.0;
    let mut sq = 0.0;
    for i in 0..N {
        let p = draw_fraction(&dist, &mut derive_stream(salt, i, 0, 0));
        ensure!((0.0..=1.0).contains(&p), "{dist:?} produced {p}");
        sum += p;
        sq += p * p;
    }
    let mean = sum / N as f64;
    Ok((mean, sq / N as f64 - mean * mean))
}

fn distribution_statistics() -> Result<String, String> {
    let (m1, v1) = moments(SelectionDistribution::Beta { alpha: 1.0 }, 1)?;
    ensure!((m1 - 0.5).abs() <= 0.01, "Beta(1,1) mean {m1}");
    ensure!((v1 - 1.0 / 12.0).abs() <= 0.005, "Beta(1,1) variance {v1}");
    let (m2, _) = moments(SelectionDistribution::Beta { alpha: 0.1 }, 2)?;
    ensure!((m2 - 0.5).abs() <= 0.01, "Beta(0.1,0.1) mean {m2}");
    let (m3, _) = moments(SelectionDistribution::FoldedNormal { mu: 0.15, sigma: 0.01 }, 3)?;
    ensure!((m3 - 0.15).abs() <= 0.001, "FoldedNormal(0.15,0.01) mean {m3}");
    Ok(format!(
        "Beta(1,1) mean {m1:.4} var {v1:.5}; Beta(0.1,0.1) mean {m2:.4}; FoldedNormal(0.15,0.01) mean {m3:.5}"
    ))
}

// ---------------------------------------------------------------------------

/// All permutations of `0..n` by recursive insertion.
fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in all_permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn all_pairs(n: usize) -> Vec<Vec<usize>> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| vec![a, b])).collect()
}

fn frequencies(outcomes: &[Vec<usize>], draws: u64, mut draw: impl FnMut(u64) -> Vec<usize>) -> Result<Vec<f64>, String> {
    let mut counts: HashMap<Vec<usize>, u64> = outcomes.iter().map(|o| (o.clone(), 0)).collect();
    for i in 0..draws {
        let o = draw(i);
        *counts.get_mut(&o).ok_or_else(|| format!("outcome {o:?} not in enumeration"))? += 1;
    }
    Ok(outcomes.iter().map(|o| counts[o] as f64 / draws as f64).collect())
}

fn uniformity() -> Result<String, String> {
    let perms = all_permutations(3);
    ensure!(perms.len() == 6, "enumeration size");
    let pf = frequencies(&perms, 60_000, |i| sample_permutation(3, &mut derive_stream(10, i, 0, 0)))?;
    for (o, f) in perms.iter().zip(&pf) {
        ensure!((f - 1.0 / 6.0).abs() <= 0.01, "permutation {o:?} frequency {f}");
    }
    let pairs = all_pairs(5);
    ensure!(pairs.len() == 10, "enumeration size");
    let af = frequencies(&pairs, 50_000, |i| sample_addresses(2, 5, &mut derive_stream(11, i, 0, 0)).unwrap())?;
    for (o, f) in pairs.iter().zip(&af) {
        ensure!((f - 0.1).abs() <= 0.01, "subset {o:?} frequency {f}");
    }
    let spread = |fs: &[f64], target: f64| fs.iter().map(|f| (f - target).abs()).fold(0.0, f64::max);
    Ok(format!(
        "max deviation: permutations {:.4}, subsets {:.4}",
        spread(&pf, 1.0 / 6.0),
        spread(&af, 0.1)
    ))
}

// ---------------------------------------------------------------------------

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Result<String, String> {
    let dir = tempfile::tempdir().unwrap();
    let inputs = write_fixture(dir.path(), 100, 21);
    let mut compared = 0;
    for preset in ["mult-mosei", "mmrnn-mosei"] {
        let runs: Vec<_> = [("a", "1"), ("b", "1"), ("c", "8")]
            .iter()
            .map(|(tag, threads)| {
                let out_dir = dir.path().join(format!("{preset}-{tag}"));
                let out = augment(&inputs, &out_dir, &["--preset", preset, "--seed", "42", "--copies", "2", "--threads", threads]);
                ensure!(out.status.success(), "augment failed: {}", stderr(&out));
                Ok(dir_bytes(&out_dir))
            })
            .collect::<Result<_, String>>()?;
        ensure!(runs[0] == runs[1], "{preset}: two single-worker runs differ");
        ensure!(runs[0] == runs[2], "{preset}: 1 vs 8 workers differ");
        compared += runs[0].len();
    }
    Ok(format!("{compared} output files byte-identical across repeated runs and 1/8 workers"))
}

// ---------------------------------------------------------------------------

/// Byte offset of value `(t, a)` of sequence `index` in an SQAF file.
fn value_offset(ds: &ModalityDataset, index: usize, t: usize, a: usize) -> usize {
    let mut off = 14;
    for s in &ds.sequences()[..index] {
        off += 4 + s.seq_id().len() + 4 + s.len() * ds.dim() * 4;
    }
    let s = &ds.sequences()[index];
    off + 4 + s.seq_id().len() + 4 + (t * ds.dim() + a) * 4
}

fn verification_oracle() -> Result<String, String> {
    let dir = tempfile::tempdir().unwrap();
    let inputs = write_fixture(dir.path(), 40, 33);
    let out_dir = dir.path().join("out");
    let out = augment(&inputs, &out_dir, &["--preset", "mult-mosei", "--seed", "7", "--copies", "2"]);
    ensure!(out.status.success(), "augment failed: {}", stderr(&out));
    let plans_path = out_dir.join("plans.jsonl");
    let plans = read_plan_log(std::io::BufReader::new(fs::File::open(&plans_path).unwrap())).unwrap();

    for (name, original) in &inputs {
        let v = verify(original, &out_dir.join(format!("{name}.sqaf")), &plans_path);
        ensure!(v.status.success(), "genuine {name} output rejected: {}{}", stdout(&v), stderr(&v));
    }

    let mut rng = derive_stream(0xf11b, 0, 0, 0);
    let mut detected = 0;
    let mutated = dir.path().join("mutated");
    fs::create_dir(&mutated).unwrap();
    let candidates: Vec<_> = plans
        .iter()
        .filter(|r| !r.plan.addresses().is_empty() && !r.plan.permutation().is_empty())
        .collect();
    ensure!(!candidates.is_empty(), "no selectable cells in fixture");
    for trial in 0..100 {
        let rec = candidates[rng.bounded_uniform(candidates.len() as u64) as usize];
        let (mi, (name, original)) = inputs.iter().enumerate().find(|(_, (n, _))| *n == rec.modality).unwrap();
        let aug_path = out_dir.join(format!("{name}.sqaf"));
        let mut bytes = fs::read(&aug_path).unwrap();
        let ds = read_sqaf_bytes(&bytes, name.as_str()).unwrap();
        let index = ds
            .sequences()
            .iter()
            .position(|s| s.seq_id() == format!("{}#{}", rec.seq_id, rec.copy_index))
            .unwrap();
        let t = rng.bounded_uniform(rec.plan.permutation().len() as u64) as usize;
        let a = rec.plan.addresses()[rng.bounded_uniform(rec.plan.addresses().len() as u64) as usize];
        let off = value_offset(&ds, index, t, a) + rng.bounded_uniform(4) as usize;
        bytes[off] ^= 1 + rng.bounded_uniform(255) as u8;
        let target = mutated.join(format!("{name}-{trial}-{mi}.sqaf"));
        fs::write(&target, &bytes).unwrap();
        let v = seqaug(&[
            "verify", "--original", original.to_str().unwrap(), "--augmented", target.to_str().unwrap(),
            "--plans", plans_path.to_str().unwrap(), "--modality", name,
        ]);
        if v.status.code() == Some(1) && stdout(&v).contains(&format!("seq `{}` copy {}", rec.seq_id, rec.copy_index)) {
            detected += 1;
        }
        fs::remove_file(&target).unwrap();
    }
    ensure!(detected == 100, "{detected}/100 mutations detected");
    Ok("genuine outputs pass; 100/100 single-byte mutations detected and located".into())
}

// ---------------------------------------------------------------------------

fn scaling() -> Result<String, String> {
    let start = Instant::now();
    let base = BenchParams {
        dim: 300,
        len: 1024,
        num: 64,
        p: 0.5,
        threads: 1,
        seed: 1,
        repeats: 5,
    };
    let sweep = bench::sweep(&base, 3).map_err(|e| e.to_string())?;
    let lens: Vec<usize> = sweep.points.iter().map(|p| p.params.len).collect();
    ensure!(lens == [1024, 2048, 4096], "sweep lengths {lens:?}");
    ensure!(
        (0.8..=1.3).contains(&sweep.exponent),
        "fitted exponent {:.3} outside [0.8, 1.3]",
        sweep.exponent
    );
    let m1 = bench::measure(&BenchParams { len: 2048, ..base }).map_err(|e| e.to_string())?;
    let m2 = bench::measure(&BenchParams { len: 2048, num: 128, ..base }).map_err(|e| e.to_string())?;
    let ratio = m2.seconds / m1.seconds;
    ensure!((1.6..=2.4).contains(&ratio), "time ratio for doubled M is {ratio:.3}");
    within(start.elapsed(), Duration::from_secs(120), "scaling")?;
    Ok(format!("exponent {:.3}; M 64->128 ratio {ratio:.3}", sweep.exponent))
}

// ---------------------------------------------------------------------------

fn csv_text(ds: &ModalityDataset) -> String {
    let mut text = String::from("seq_id,t");
    for i in 0..ds.dim() {
        text.push_str(&format!(",f_{i}"));
    }
    text.push('\n');
    for s in ds.sequences() {
        for (t, row) in s.rows().enumerate() {
            text.push_str(&format!("{},{t}", s.seq_id()));
            for v in row {
                // Display of f32 is the shortest round-tripping form.
                text.push_str(&format!(",{v}"));
            }
            text.push('\n');
        }
    }
    text
}

fn format_round_trips() -> Result<String, String> {
    let mut rng = derive_stream(0xf0, 0, 0, 0);
    let canonical_nan = "NaN".parse::<f32>().unwrap().to_bits();
    let mut nan_cells = 0usize;
    for case in 0..1000u64 {
        let dim = 1 + rng.bounded_uniform(24) as usize;
        let num = rng.bounded_uniform(8) as usize;
        let min_len = u64::from(case % 2 == 0); // odd cases may hold empty sequences
        let seqs: Vec<_> = (0..num)
            .map(|i| {
                let len = (min_len + rng.bounded_uniform(12)) as usize;
                let data = (0..len * dim)
                    .map(|_| match rng.bounded_uniform(10) {
                        0 => f32::from_bits(0x7f80_0000 | (rng.next_u64() as u32 & 0x807f_ffff) | 1),
                        1 => f32::INFINITY,
                        2 => f32::NEG_INFINITY,
                        _ => f32::from_bits(rng.next_u64() as u32),
                    })
                    .collect();
                FeatureSequence::new(format!("s{case}-{i}"), dim, data).unwrap()
            })
            .collect();
        let ds = ModalityDataset::new("m", dim, seqs).unwrap();

        let mut bytes = Vec::new();
        write_sqaf(&ds, &mut bytes).map_err(|e| e.to_string())?;
        let back = read_sqaf_bytes(&bytes, "m").map_err(|e| format!("case {case}: {e}"))?;
        ensure!(back == ds, "case {case}: SQAF write/read not identity");
        let mut again = Vec::new();
        write_sqaf(&back, &mut again).unwrap();
        ensure!(again == bytes, "case {case}: SQAF read/write not identity");

        if min_len == 1 {
            let imported = import_csv(csv_text(&ds).as_bytes(), "m").map_err(|e| format!("case {case}: {e}"))?;
            let mut via = Vec::new();
            write_sqaf(&imported, &mut via).unwrap();
            let reread = read_sqaf_bytes(&via, "m").unwrap();
            ensure!(reread.len() == ds.len(), "case {case}: sequence count");
            for (orig, got) in ds.sequences().iter().zip(reread.sequences()) {
                ensure!(orig.seq_id() == got.seq_id() && orig.len() == got.len(), "case {case}: shape");
                for (x, y) in orig.data().iter().zip(got.data()) {
                    let want = if x.is_nan() { canonical_nan } else { x.to_bits() };
                    nan_cells += usize::from(x.is_nan());
                    ensure!(y.to_bits() == want, "case {case}: {x} became {y}");
                }
            }
        }
    }
    Ok(format!("1000 datasets, SQAF bitwise identity, CSV->SQAF exact ({nan_cells} NaN cells)"))
}

// ---------------------------------------------------------------------------

fn main() {
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let criteria: &[Criterion] = &[
        ("worked-example", worked_example),
        ("multiset-identity", multiset_identity_suite),
        ("distribution-statistics", distribution_statistics),
        ("uniformity", uniformity),
        ("determinism", determinism),
        ("verification-oracle", verification_oracle),
        ("scaling", scaling),
        ("format-round-trips", format_round_trips),
    ];
    let mut failed = 0;
    let mut ran = 0;
    for (name, run) in criteria {
        if filter.as_deref().is_some_and(|f| !name.contains(f)) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("[PASS] {name} ({secs:.2}s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {name} ({secs:.2}s): {why}");
            }
        }
    }
    println!("acceptance: {}/{ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
