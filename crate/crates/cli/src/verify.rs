//! Replays a plan log against the original dataset and checks the augmented
//! file, plus log-independent checks of the column invariants.

use std::collections::HashMap;
use std::fmt;

use seqaug_core::{apply_plan, fraction_to_count, AugmentPlan, FeatureSequence, ModalityDataset, PlanLogRecord};

use crate::augment::replica_id;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub seq_id: String,
    pub copy: Option<u64>,
    pub modality: String,
    pub address: Option<usize>,
    pub reason: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "seq `{}`", self.seq_id)?;
        if let Some(c) = self.copy {
            write!(f, " copy {c}")?;
        }
        write!(f, " modality `{}`", self.modality)?;
        if let Some(a) = self.address {
            write!(f, " address {a}")?;
        }
        write!(f, ": {}", self.reason)
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub sequences_checked: usize,
    pub failures: Vec<Failure>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn sorted_bits(it: impl Iterator<Item = f32>) -> Vec<u32> {
    let mut v: Vec<u32> = it.map(f32::to_bits).collect();
    v.sort_unstable();
    v
}

fn column_bits(seq: &FeatureSequence, a: usize) -> Vec<u32> {
    seq.column(a).map(f32::to_bits).collect()
}

struct Checker<'a> {
    modality: &'a str,
    report: VerifyReport,
}

impl Checker<'_> {
    fn fail(&mut self, seq_id: &str, copy: Option<u64>, address: Option<usize>, reason: impl Into<String>) {
        self.report.failures.push(Failure {
            seq_id: seq_id.to_owned(),
            copy,
            modality: self.modality.to_owned(),
            address,
            reason: reason.into(),
        });
    }

    /// Compares one augmented replica against its original.
    fn check_pair(&mut self, orig: &FeatureSequence, aug: &FeatureSequence, copy: u64, plan: Option<&AugmentPlan>) {
        let id = orig.seq_id();
        let before = self.report.failures.len();
        if aug.len() != orig.len() || aug.dim() != orig.dim() {
            self.fail(
                id,
                Some(copy),
                None,
                format!("shape {}x{} differs from original {}x{}", aug.len(), aug.dim(), orig.len(), orig.dim()),
            );
            return;
        }
        let selected: &[usize] = plan.map_or(&[], |p| p.addresses());

        if let Some(plan) = plan {
            if plan.addresses().len() != fraction_to_count(plan.fraction(), orig.dim()) {
                self.fail(id, Some(copy), None, "address count does not match the logged fraction");
            }
            match apply_plan(orig, plan) {
                Ok(expected) => {
                    for a in 0..orig.dim() {
                        if column_bits(&expected, a) != column_bits(aug, a) {
                            self.fail(id, Some(copy), Some(a), "replayed plan does not reproduce the augmented values");
                        }
                    }
                }
                Err(e) => self.fail(id, Some(copy), None, e.to_string()),
            }
        }

        // Independent of the permutation: selected columns keep their
        // multiset, all others are untouched.
        let mut is_selected = vec![false; orig.dim()];
        for &a in selected.iter().filter(|&&a| a < orig.dim()) {
            is_selected[a] = true;
        }
        for (a, &sel) in is_selected.iter().enumerate() {
            if sel {
                if sorted_bits(orig.column(a)) != sorted_bits(aug.column(a)) {
                    self.fail(id, Some(copy), Some(a), "selected column multiset changed");
                }
            } else if column_bits(orig, a) != column_bits(aug, a) {
                self.fail(id, Some(copy), Some(a), "unselected column changed");
            }
        }
        // One failure per address is enough; drop duplicates of the same cause.
        let mut seen = std::collections::HashSet::new();
        let tail = self.report.failures.split_off(before);
        self.report
            .failures
            .extend(tail.into_iter().filter(|f| seen.insert((f.address, f.reason.clone()))));
    }
}

/// Verifies `augmented` against `original` using the records of `modality`
/// in `plans`.
///
/// Without records for the modality (inference mode, or a stream that was
/// not configured) every replica must equal its original bit for bit.
pub fn verify(original: &ModalityDataset, augmented: &ModalityDataset, plans: &[PlanLogRecord], modality: &str) -> VerifyReport {
    let mut ck = Checker {
        modality,
        report: VerifyReport::default(),
    };
    let records: Vec<&PlanLogRecord> = plans.iter().filter(|r| r.modality == modality).collect();

    let mut by_key: HashMap<(&str, u64), &AugmentPlan> = HashMap::new();
    for r in &records {
        if by_key.insert((r.seq_id.as_str(), r.copy_index), &r.plan).is_some() {
            ck.fail(&r.seq_id, Some(r.copy_index), None, "duplicate plan record");
        }
    }

    let copies = if records.is_empty() {
        if original.is_empty() {
            1
        } else {
            (augmented.len() / original.len()).max(1) as u64
        }
    } else {
        records.iter().map(|r| r.copy_index).max().unwrap() + 1
    };
    let expected_len = original.len() as u64 * copies;
    if augmented.len() as u64 != expected_len {
        ck.fail(
            "*",
            None,
            None,
            format!("augmented file holds {} sequences, expected {expected_len}", augmented.len()),
        );
        return ck.report;
    }
    if augmented.dim() != original.dim() {
        ck.fail("*", None, None, format!("dim {} differs from original {}", augmented.dim(), original.dim()));
        return ck.report;
    }

    let mut used = 0usize;
    for (i, orig) in original.sequences().iter().enumerate() {
        for copy in 0..copies {
            let aug = &augmented.sequences()[i * copies as usize + copy as usize];
            let want_id = replica_id(orig.seq_id(), copy, copies);
            if aug.seq_id() != want_id {
                ck.fail(orig.seq_id(), Some(copy), None, format!("found seq_id `{}`, expected `{want_id}`", aug.seq_id()));
            }
            let plan = by_key.get(&(orig.seq_id(), copy)).copied();
            if plan.is_some() {
                used += 1;
            } else if !records.is_empty() {
                ck.fail(orig.seq_id(), Some(copy), None, "missing plan record");
                continue;
            }
            ck.check_pair(orig, aug, copy, plan);
            ck.report.sequences_checked += 1;
        }
    }
    if used < by_key.len() {
        let known: std::collections::HashSet<&str> = original.sequences().iter().map(|s| s.seq_id()).collect();
        for &(id, copy) in by_key.keys() {
            if !known.contains(id) || copy >= copies {
                ck.fail(id, Some(copy), None, "plan record matches no original sequence");
            }
        }
    }
    ck.report
}
