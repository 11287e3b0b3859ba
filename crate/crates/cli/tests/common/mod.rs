#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use seqaug_core::{derive_stream, FeatureSequence, ModalityDataset};

pub fn seqaug(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqaug"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Aligned text / audio / visual datasets with `num` samples of varying
/// length (including empty and singleton sequences).
pub fn write_fixture(dir: &Path, num: usize, seed: u64) -> Vec<(String, PathBuf)> {
    let dims = [("text", 300usize), ("audio", 74), ("visual", 35)];
    let lens: Vec<usize> = (0..num)
        .map(|i| match i {
            0 => 0,
            1 => 1,
            _ => 2 + derive_stream(seed, i as u64, 7, 7).bounded_uniform(60) as usize,
        })
        .collect();
    dims.iter()
        .enumerate()
        .map(|(m, &(name, dim))| {
            let seqs = lens
                .iter()
                .enumerate()
                .map(|(i, &len)| {
                    let mut rng = derive_stream(seed, i as u64, 99, m as u64);
                    let data = (0..len * dim).map(|_| (rng.next_u64() >> 40) as f32 / 65536.0 - 128.0).collect();
                    FeatureSequence::new(format!("utt-{i:03}"), dim, data).unwrap()
                })
                .collect();
            let path = dir.join(format!("{name}.sqaf"));
            ModalityDataset::new(name, dim, seqs).unwrap().save(&path).unwrap();
            (name.to_owned(), path)
        })
        .collect()
}

pub fn input_args(inputs: &[(String, PathBuf)]) -> Vec<String> {
    inputs
        .iter()
        .flat_map(|(n, p)| ["--input".to_owned(), format!("{n}={}", p.display())])
        .collect()
}

pub fn augment(inputs: &[(String, PathBuf)], output: &Path, extra: &[&str]) -> Output {
    let mut args: Vec<String> = vec!["augment".into(), "--output".into(), output.display().to_string()];
    args.extend(input_args(inputs));
    args.extend(extra.iter().map(|s| s.to_string()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    seqaug(&refs)
}

pub fn verify(original: &Path, augmented: &Path, plans: &Path) -> Output {
    seqaug(&[
        "verify",
        "--original",
        original.to_str().unwrap(),
        "--augmented",
        augmented.to_str().unwrap(),
        "--plans",
        plans.to_str().unwrap(),
    ])
}
