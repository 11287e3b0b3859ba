//! CSV ingest. Header `seq_id,t,f_0,...,f_{d-1}`, one row per timestep,
//! rows of a sequence contiguous with `t` counting up from 0.

use std::io::Read;

use super::{FormatError, ModalityDataset};
use crate::sequence::FeatureSequence;

fn csv_err(line: u64, message: impl Into<String>) -> FormatError {
    FormatError::Csv {
        line,
        message: message.into(),
    }
}

/// Builds one sequence per seq_id in first-appearance order. Cells parse as
/// `f32`; `nan`, `inf` and `-inf` are accepted.
pub fn import_csv<R: Read>(source: R, modality_name: &str) -> Result<ModalityDataset, FormatError> {
    let mut reader = ::csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(::csv::Trim::All)
        .from_reader(source);

    let header = reader.headers().map_err(|e| csv_err(1, e.to_string()))?.clone();
    if header.len() < 3 || &header[0] != "seq_id" || &header[1] != "t" {
        return Err(csv_err(1, "header must be `seq_id,t,f_0,...`"));
    }
    for (i, name) in header.iter().skip(2).enumerate() {
        if name != format!("f_{i}") {
            return Err(csv_err(1, format!("expected column `f_{i}`, found `{name}`")));
        }
    }
    let dim = header.len() - 2;

    let mut sequences: Vec<FeatureSequence> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut current: Option<(String, Vec<f32>)> = None;
    let mut record = ::csv::StringRecord::new();
    loop {
        let line = reader.position().line();
        match reader.read_record(&mut record) {
            Ok(true) => {}
            Ok(false) => break,
            Err(e) => return Err(csv_err(line, e.to_string())),
        }
        let line = record.position().map_or(line, |p| p.line());
        if record.len() != header.len() {
            return Err(csv_err(
                line,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        let seq_id = &record[0];
        let t: u64 = record[1]
            .parse()
            .map_err(|_| csv_err(line, format!("bad timestep `{}`", &record[1])))?;

        let continuing = current.as_ref().is_some_and(|(id, _)| id == seq_id);
        if !continuing {
            if seen.contains(seq_id) {
                return Err(csv_err(line, format!("rows of seq_id `{seq_id}` are not contiguous")));
            }
            if let Some((id, data)) = current.take() {
                sequences.push(FeatureSequence::new(id, dim, data).expect("rows have width dim"));
            }
            seen.insert(seq_id.to_owned());
            current = Some((seq_id.to_owned(), Vec::new()));
        }
        let (_, data) = current.as_mut().unwrap();
        let expected = (data.len() / dim) as u64;
        if t < expected {
            return Err(csv_err(line, format!("duplicate (seq_id, t) = (`{seq_id}`, {t})")));
        }
        if t != expected {
            return Err(csv_err(
                line,
                format!("non-contiguous t for `{seq_id}`: expected {expected}, found {t}"),
            ));
        }
        for (col, cell) in record.iter().skip(2).enumerate() {
            let v: f32 = cell
                .parse()
                .map_err(|_| csv_err(line, format!("bad value `{cell}` in column f_{col}")))?;
            data.push(v);
        }
    }
    if let Some((id, data)) = current {
        sequences.push(FeatureSequence::new(id, dim, data).expect("rows have width dim"));
    }
    ModalityDataset::new(modality_name, dim, sequences)
}
