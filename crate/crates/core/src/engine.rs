//! Plan construction and application, and the per-sample driver.

use std::collections::BTreeMap;

use crate::config::{validate_config, AugmentConfig, Mode, SelectionDistribution};
use crate::error::{Error, Result};
use crate::sampling::{derive_stream, draw_fraction, fraction_to_count, sample_addresses, sample_permutation, RngStream};
use crate::sequence::{AugmentPlan, FeatureSequence, PlanLogRecord};

/// All modality streams of one sample. Streams need not share `T` or `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultimodalSample {
    pub sample_id: String,
    pub streams: BTreeMap<String, FeatureSequence>,
}

impl MultimodalSample {
    pub fn new(sample_id: impl Into<String>) -> Self {
        MultimodalSample {
            sample_id: sample_id.into(),
            streams: BTreeMap::new(),
        }
    }

    pub fn with_stream(mut self, modality: impl Into<String>, seq: FeatureSequence) -> Self {
        self.streams.insert(modality.into(), seq);
        self
    }
}

/// Draws the fraction, then the address set, then the permutation, in that
/// order, from `rng`.
pub fn make_plan(len: usize, dim: usize, dist: &SelectionDistribution, rng: &mut RngStream) -> Result<AugmentPlan> {
    if dim == 0 {
        return Err(Error::ZeroDim);
    }
    let violations = dist.violations("<plan>");
    if !violations.is_empty() {
        return Err(Error::InvalidConfig(violations));
    }
    let p = draw_fraction(dist, rng);
    let addresses = sample_addresses(fraction_to_count(p, dim), dim, rng)?;
    let pi = sample_permutation(len, rng);
    Ok(AugmentPlan::from_parts(p, addresses, pi))
}

/// Maximal runs of consecutive addresses as `start..end` column ranges.
fn address_runs(addresses: &[usize]) -> Vec<std::ops::Range<usize>> {
    let mut runs: Vec<std::ops::Range<usize>> = Vec::new();
    for &a in addresses {
        match runs.last_mut() {
            Some(run) if run.end == a => run.end += 1,
            _ => runs.push(a..a + 1),
        }
    }
    runs
}

/// Writes `out[t][a] = in[pi[t]][a]` for the selected addresses into a fresh
/// buffer; every other value is copied bit for bit. `seq` is not modified.
pub fn apply_plan(seq: &FeatureSequence, plan: &AugmentPlan) -> Result<FeatureSequence> {
    plan.check_shape(seq.len(), seq.dim())?;
    let dim = seq.dim();
    let src = seq.data();
    let mut out = src.to_vec();
    if !plan.is_identity() {
        let runs = address_runs(plan.addresses());
        for (t, (dst_row, &from)) in out.chunks_exact_mut(dim).zip(plan.permutation()).enumerate() {
            if from == t {
                continue;
            }
            let src_row = &src[from * dim..(from + 1) * dim];
            for run in &runs {
                dst_row[run.clone()].copy_from_slice(&src_row[run.clone()]);
            }
        }
    }
    FeatureSequence::new(seq.seq_id(), dim, out)
}

pub fn augment_sequence(
    seq: &FeatureSequence,
    dist: &SelectionDistribution,
    rng: &mut RngStream,
) -> Result<(FeatureSequence, AugmentPlan)> {
    let plan = make_plan(seq.len(), seq.dim(), dist, rng)?;
    let out = apply_plan(seq, &plan)?;
    Ok((out, plan))
}

/// Augments every configured stream of `sample` with its own stream derived
/// from `(cfg.master_seed, seq_index, copy_index, modality ordinal)`.
///
/// Streams not named in `cfg` are copied unchanged. In inference mode the
/// whole sample is returned unchanged with an empty log. Log records come
/// out in modality-ordinal order.
pub fn augment_sample(
    sample: &MultimodalSample,
    cfg: &AugmentConfig,
    seq_index: u64,
    copy_index: u64,
) -> Result<(MultimodalSample, Vec<PlanLogRecord>)> {
    let violations = validate_config(cfg);
    if !violations.is_empty() {
        return Err(Error::InvalidConfig(violations));
    }
    if cfg.mode == Mode::Inference {
        return Ok((sample.clone(), Vec::new()));
    }
    if let Some(missing) = cfg.modalities.iter().find(|m| !sample.streams.contains_key(&m.name)) {
        return Err(Error::MissingModality(missing.name.clone()));
    }

    let mut out = MultimodalSample::new(sample.sample_id.clone());
    for (name, seq) in &sample.streams {
        if cfg.ordinal_of(name).is_none() {
            out.streams.insert(name.clone(), seq.clone());
        }
    }
    let mut log = Vec::with_capacity(cfg.modalities.len());
    for (ordinal, modality) in cfg.modalities.iter().enumerate() {
        let seq = &sample.streams[&modality.name];
        let mut rng = derive_stream(cfg.master_seed, seq_index, copy_index, ordinal as u64);
        let (augmented, plan) = augment_sequence(seq, &modality.dist, &mut rng)?;
        out.streams.insert(modality.name.clone(), augmented);
        log.push(PlanLogRecord {
            seq_id: seq.seq_id().to_owned(),
            copy_index,
            modality: modality.name.clone(),
            plan,
        });
    }
    Ok((out, log))
}
