//! Dataset persistence: the SQAF binary container, CSV ingest and the JSONL
//! plan log.

mod csv;
mod plan_log;
mod sqaf;

use std::collections::HashSet;
use std::path::Path;

pub use self::csv::import_csv;
pub use self::plan_log::{read_plan_log, write_plan_log};
pub use self::sqaf::{read_sqaf, read_sqaf_bytes, write_sqaf, SQAF_HEADER_LEN, SQAF_MAGIC, SQAF_VERSION};

use crate::sequence::FeatureSequence;

/// Parse and I/O failures, each located by byte offset or line number.
#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("bad magic {found:?} at offset {offset} (expected \"SQAF\")")]
    BadMagic { offset: u64, found: Vec<u8> },

    #[error("unsupported SQAF version {version} at offset {offset}")]
    UnsupportedVersion { offset: u64, version: u16 },

    #[error("truncated {what} at offset {offset}: expected {expected} bytes, {available} available")]
    Truncated {
        offset: u64,
        what: &'static str,
        expected: u64,
        available: u64,
    },

    #[error("payload size overflow at offset {offset}: T={len} x d={dim}")]
    SizeOverflow { offset: u64, len: u32, dim: u32 },

    #[error("zero feature dimensionality at offset {offset}")]
    ZeroDim { offset: u64 },

    #[error("seq_id at offset {offset} is not valid UTF-8")]
    InvalidSeqId { offset: u64 },

    #[error("duplicate seq_id `{seq_id}` at offset {offset}")]
    DuplicateSeqId { offset: u64, seq_id: String },

    #[error("{count} trailing bytes at offset {offset}")]
    TrailingBytes { offset: u64, count: u64 },

    #[error("{field} does not fit in 32 bits ({value})")]
    TooLarge { field: &'static str, value: u64 },

    #[error("I/O error at byte offset {offset}: {source}")]
    Io {
        offset: u64,
        #[source]
        source: std::io::Error,
    },

    #[error("csv line {line}: {message}")]
    Csv { line: u64, message: String },

    #[error("plan log line {line}: {message}")]
    PlanLog { line: u64, message: String },

    #[error("plan log line {line}: invalid plan: {message}")]
    InvalidPlan { line: u64, message: String },

    #[error("invalid dataset: {0}")]
    Dataset(String),
}

/// All sequences of one modality. Sequence order is the canonical sequence
/// index used for stream derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModalityDataset {
    modality_name: String,
    dim: usize,
    sequences: Vec<FeatureSequence>,
}

impl ModalityDataset {
    /// Requires a shared `dim >= 1` and unique seq_ids.
    pub fn new(modality_name: impl Into<String>, dim: usize, sequences: Vec<FeatureSequence>) -> Result<Self, FormatError> {
        if dim == 0 {
            return Err(FormatError::Dataset("dim must be at least 1".into()));
        }
        let mut ids = HashSet::with_capacity(sequences.len());
        for seq in &sequences {
            if seq.dim() != dim {
                return Err(FormatError::Dataset(format!(
                    "sequence `{}` has dim {} but the dataset has dim {dim}",
                    seq.seq_id(),
                    seq.dim()
                )));
            }
            if !ids.insert(seq.seq_id()) {
                return Err(FormatError::Dataset(format!("duplicate seq_id `{}`", seq.seq_id())));
            }
        }
        Ok(ModalityDataset {
            modality_name: modality_name.into(),
            dim,
            sequences,
        })
    }

    pub fn modality_name(&self) -> &str {
        &self.modality_name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sequences(&self) -> &[FeatureSequence] {
        &self.sequences
    }

    pub fn into_sequences(self) -> Vec<FeatureSequence> {
        self.sequences
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    /// Reads an SQAF file; the modality name is the file stem.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, FormatError> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|source| FormatError::Io { offset: 0, source })?;
        read_sqaf_bytes(&bytes, modality_from_path(path))
    }

    /// Writes an SQAF file, returning the byte count.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<u64, FormatError> {
        let file = std::fs::File::create(path).map_err(|source| FormatError::Io { offset: 0, source })?;
        let mut sink = std::io::BufWriter::new(file);
        let n = write_sqaf(self, &mut sink)?;
        std::io::Write::flush(&mut sink).map_err(|source| FormatError::Io { offset: n, source })?;
        Ok(n)
    }
}

/// The modality a dataset file holds, taken from its file stem.
pub fn modality_from_path(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}
