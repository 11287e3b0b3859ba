//! Offline augmentation of per-modality dataset files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use seqaug_core::io::{import_csv, read_sqaf_bytes, write_plan_log};
use seqaug_core::{augment_sample, AugmentConfig, FeatureSequence, Mode, ModalityDataset, MultimodalSample, PlanLogRecord};

use crate::error::{CliError, Result};
use crate::presets;

pub const PLAN_LOG_FILE: &str = "plans.jsonl";
pub const CONFIG_FILE: &str = "config.json";

#[derive(Debug, Clone)]
pub enum ConfigSource {
    File(PathBuf),
    Preset(String),
}

#[derive(Debug, Clone)]
pub struct AugmentOptions {
    pub config: ConfigSource,
    /// `(modality, path)`; `.csv` files are imported, anything else is read as SQAF.
    pub inputs: Vec<(String, PathBuf)>,
    pub output: PathBuf,
    pub seed: Option<u64>,
    pub copies: Option<u32>,
    pub mode: Option<Mode>,
    /// Worker count; 0 lets rayon decide.
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentSummary {
    pub sequences: usize,
    pub replicas: usize,
    pub plan_records: usize,
    pub files: Vec<PathBuf>,
}

/// Parses a `name=path` input argument.
pub fn parse_input(arg: &str) -> Result<(String, PathBuf), String> {
    match arg.split_once('=') {
        Some((name, path)) if !name.is_empty() && !path.is_empty() => Ok((name.to_owned(), PathBuf::from(path))),
        _ => Err(format!("expected `modality=path`, got `{arg}`")),
    }
}

/// Output seq_id of replica `copy`: the original id when one replica is
/// produced, `"{seq_id}#{copy}"` otherwise.
pub fn replica_id(seq_id: &str, copy: u64, copies: u64) -> String {
    if copies == 1 {
        seq_id.to_owned()
    } else {
        format!("{seq_id}#{copy}")
    }
}

/// Replicas written per input sequence. Inference mode is a pass-through,
/// so it writes exactly one.
pub fn replicas_per_sequence(cfg: &AugmentConfig) -> u64 {
    match cfg.mode {
        Mode::Train => cfg.copies as u64,
        Mode::Inference => 1,
    }
}

pub fn resolve_config(opts: &AugmentOptions) -> Result<AugmentConfig> {
    let mut cfg = match &opts.config {
        ConfigSource::File(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
            AugmentConfig::from_json(&text).map_err(|e| CliError::io(path.display(), e))?
        }
        ConfigSource::Preset(name) => {
            let modalities = presets::preset(name).ok_or_else(|| {
                CliError::Validation(format!(
                    "unknown preset `{name}` (available: {})",
                    presets::PRESET_NAMES.join(", ")
                ))
            })?;
            AugmentConfig {
                mode: Mode::Train,
                master_seed: 0,
                copies: 1,
                modalities,
            }
        }
    };
    if let Some(seed) = opts.seed {
        cfg.master_seed = seed;
    }
    if let Some(copies) = opts.copies {
        cfg.copies = copies;
    }
    if let Some(mode) = opts.mode {
        cfg.mode = mode;
    }
    Ok(cfg.validated()?)
}

pub fn load_dataset(modality: &str, path: &Path) -> Result<ModalityDataset> {
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let ds = if is_csv {
        let file = fs::File::open(path).map_err(|e| CliError::io(path.display(), e))?;
        import_csv(std::io::BufReader::new(file), modality)
    } else {
        let bytes = fs::read(path).map_err(|e| CliError::io(path.display(), e))?;
        read_sqaf_bytes(&bytes, modality)
    };
    ds.map_err(|e| CliError::from(e).context(path.display()))
}

/// Checks that every modality holds the same seq_ids in the same order.
fn check_alignment(datasets: &[ModalityDataset]) -> Result<()> {
    let Some((first, rest)) = datasets.split_first() else {
        return Ok(());
    };
    for ds in rest {
        if ds.len() != first.len() {
            return Err(CliError::Validation(format!(
                "modality `{}` has {} sequences but `{}` has {}",
                ds.modality_name(),
                ds.len(),
                first.modality_name(),
                first.len()
            )));
        }
        for (i, (a, b)) in first.sequences().iter().zip(ds.sequences()).enumerate() {
            if a.seq_id() != b.seq_id() {
                return Err(CliError::Validation(format!(
                    "sequence #{i} is `{}` in `{}` but `{}` in `{}`",
                    a.seq_id(),
                    first.modality_name(),
                    b.seq_id(),
                    ds.modality_name()
                )));
            }
        }
    }
    Ok(())
}

pub(crate) fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Io(format!("cannot start worker pool: {e}")))
}

/// Augments already-loaded, aligned datasets. Output datasets follow the
/// order of `datasets`; sequences are ordered by (sequence, copy) and plan
/// records by (sequence, copy, modality ordinal).
pub fn augment_datasets(
    datasets: &[ModalityDataset],
    cfg: &AugmentConfig,
    threads: usize,
) -> Result<(Vec<ModalityDataset>, Vec<PlanLogRecord>)> {
    check_alignment(datasets)?;
    if let Some(missing) = cfg
        .modalities
        .iter()
        .find(|m| !datasets.iter().any(|d| d.modality_name() == m.name))
    {
        return Err(CliError::Validation(format!(
            "configured modality `{}` has no --input",
            missing.name
        )));
    }

    let num = datasets.first().map_or(0, ModalityDataset::len);
    let replicas = replicas_per_sequence(cfg);
    let work: Vec<(usize, u64)> = (0..num).flat_map(|i| (0..replicas).map(move |c| (i, c))).collect();

    let run = || {
        work.par_iter()
            .map(|&(i, copy)| {
                let sample = datasets.iter().fold(
                    MultimodalSample::new(datasets[0].sequences()[i].seq_id()),
                    |s, d| s.with_stream(d.modality_name(), d.sequences()[i].clone()),
                );
                augment_sample(&sample, cfg, i as u64, copy)
            })
            .collect::<seqaug_core::Result<Vec<_>>>()
    };
    let results = thread_pool(threads)?.install(run)?;

    let mut per_modality: BTreeMap<&str, Vec<FeatureSequence>> = datasets
        .iter()
        .map(|d| (d.modality_name(), Vec::with_capacity(work.len())))
        .collect();
    let mut log = Vec::new();
    for (&(_, copy), (mut sample, records)) in work.iter().zip(results) {
        for d in datasets {
            let seq = sample.streams.remove(d.modality_name()).expect("every stream is returned");
            let id = replica_id(seq.seq_id(), copy, replicas);
            per_modality.get_mut(d.modality_name()).unwrap().push(seq.with_seq_id(id));
        }
        log.extend(records);
    }
    let outputs = datasets
        .iter()
        .map(|d| {
            let seqs = per_modality.remove(d.modality_name()).unwrap();
            ModalityDataset::new(d.modality_name(), d.dim(), seqs).map_err(CliError::from)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((outputs, log))
}

/// Runs a full augmentation: `<output>/<modality>.sqaf` per input,
/// `plans.jsonl`, and the effective `config.json`. The directory appears
/// only once everything has been written.
pub fn run_augment(opts: &AugmentOptions) -> Result<AugmentSummary> {
    let cfg = resolve_config(opts)?;
    if opts.inputs.is_empty() {
        return Err(CliError::Validation("at least one --input is required".into()));
    }
    let mut names = std::collections::HashSet::new();
    for (name, _) in &opts.inputs {
        if !names.insert(name.as_str()) {
            return Err(CliError::Validation(format!("modality `{name}` given more than once")));
        }
    }
    if opts.output.exists() {
        return Err(CliError::Io(format!("output {} already exists", opts.output.display())));
    }

    let datasets = opts
        .inputs
        .iter()
        .map(|(name, path)| load_dataset(name, path))
        .collect::<Result<Vec<_>>>()?;
    let (outputs, log) = augment_datasets(&datasets, &cfg, opts.threads)?;

    let staging = staging_dir(&opts.output)?;
    let written = write_outputs(&staging, &outputs, &log, &cfg);
    let files = match written {
        Ok(files) => files,
        Err(e) => {
            let _ = fs::remove_dir_all(&staging);
            return Err(e);
        }
    };
    if let Err(e) = fs::rename(&staging, &opts.output) {
        let _ = fs::remove_dir_all(&staging);
        return Err(CliError::io(opts.output.display(), e));
    }
    Ok(AugmentSummary {
        sequences: datasets.first().map_or(0, ModalityDataset::len),
        replicas: replicas_per_sequence(&cfg) as usize,
        plan_records: log.len(),
        files: files.into_iter().map(|f| opts.output.join(f)).collect(),
    })
}

fn staging_dir(output: &Path) -> Result<PathBuf> {
    let name = output
        .file_name()
        .ok_or_else(|| CliError::Io(format!("output {} has no directory name", output.display())))?;
    let parent = match output.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let staging = parent.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(|e| CliError::io(staging.display(), e))?;
    }
    fs::create_dir(&staging).map_err(|e| CliError::io(staging.display(), e))?;
    Ok(staging)
}

fn write_outputs(dir: &Path, outputs: &[ModalityDataset], log: &[PlanLogRecord], cfg: &AugmentConfig) -> Result<Vec<String>> {
    let mut files = Vec::new();
    for ds in outputs {
        let file = format!("{}.sqaf", ds.modality_name());
        ds.save(dir.join(&file)).map_err(|e| CliError::io(&file, e))?;
        files.push(file);
    }
    let mut buf = Vec::new();
    write_plan_log(log, &mut buf)?;
    fs::write(dir.join(PLAN_LOG_FILE), buf).map_err(|e| CliError::io(PLAN_LOG_FILE, e))?;
    files.push(PLAN_LOG_FILE.to_owned());
    fs::write(dir.join(CONFIG_FILE), cfg.to_json() + "\n").map_err(|e| CliError::io(CONFIG_FILE, e))?;
    files.push(CONFIG_FILE.to_owned());
    Ok(files)
}
