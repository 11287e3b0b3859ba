//! JSONL plan log: one object per line with keys
//! `seq_id, copy, modality, p, addresses, pi`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::FormatError;
use crate::sequence::{AugmentPlan, PlanLogRecord};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanLine<'a> {
    #[serde(borrow)]
    seq_id: std::borrow::Cow<'a, str>,
    copy: u64,
    #[serde(borrow)]
    modality: std::borrow::Cow<'a, str>,
    p: f64,
    addresses: std::borrow::Cow<'a, [usize]>,
    pi: std::borrow::Cow<'a, [usize]>,
}

/// Writes the records in the order given, one line each.
pub fn write_plan_log<W: Write>(records: &[PlanLogRecord], mut sink: W) -> Result<usize, FormatError> {
    let mut offset = 0u64;
    let mut line = Vec::new();
    for r in records {
        line.clear();
        let wire = PlanLine {
            seq_id: r.seq_id.as_str().into(),
            copy: r.copy_index,
            modality: r.modality.as_str().into(),
            p: r.plan.fraction(),
            addresses: r.plan.addresses().into(),
            pi: r.plan.permutation().into(),
        };
        serde_json::to_writer(&mut line, &wire).expect("plan records serialize");
        line.push(b'\n');
        sink.write_all(&line).map_err(|source| FormatError::Io { offset, source })?;
        offset += line.len() as u64;
    }
    Ok(records.len())
}

/// Parses a plan log. Blank lines are skipped; every plan is checked for
/// its invariants (in particular that `pi` is a bijection).
pub fn read_plan_log<R: BufRead>(source: R) -> Result<Vec<PlanLogRecord>, FormatError> {
    let mut out = Vec::new();
    for (i, text) in source.lines().enumerate() {
        let line = i as u64 + 1;
        let text = text.map_err(|source| FormatError::Io { offset: line, source })?;
        if text.trim().is_empty() {
            continue;
        }
        let wire: PlanLine<'_> = serde_json::from_str(&text).map_err(|e| FormatError::PlanLog {
            line,
            message: e.to_string(),
        })?;
        let plan = AugmentPlan::new(wire.p, wire.addresses.into_owned(), wire.pi.into_owned())
            .map_err(|e| FormatError::InvalidPlan {
                line,
                message: e.to_string(),
            })?;
        out.push(PlanLogRecord {
            seq_id: wire.seq_id.into_owned(),
            copy_index: wire.copy,
            modality: wire.modality.into_owned(),
            plan,
        });
    }
    Ok(out)
}
