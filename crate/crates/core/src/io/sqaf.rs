//! SQAF v1, little-endian throughout:
//!
//! ```text
//! magic "SQAF" | version u16 = 1 | num_sequences u32 | dim u32
//! per sequence: seq_id_len u32 | seq_id (UTF-8) | T u32 | T*dim f32, time-major
//! ```

use std::collections::HashSet;
use std::io::{Read, Write};

use super::{FormatError, ModalityDataset};
use crate::sequence::FeatureSequence;

pub const SQAF_MAGIC: &[u8; 4] = b"SQAF";
pub const SQAF_VERSION: u16 = 1;
pub const SQAF_HEADER_LEN: usize = 4 + 2 + 4 + 4;

struct CountingWriter<W> {
    inner: W,
    written: u64,
}

impl<W: Write> CountingWriter<W> {
    fn put(&mut self, bytes: &[u8]) -> Result<(), FormatError> {
        self.inner.write_all(bytes).map_err(|source| FormatError::Io {
            offset: self.written,
            source,
        })?;
        self.written += bytes.len() as u64;
        Ok(())
    }
}

fn to_u32(field: &'static str, value: usize) -> Result<u32, FormatError> {
    u32::try_from(value).map_err(|_| FormatError::TooLarge {
        field,
        value: value as u64,
    })
}

/// Serializes `ds`; identical datasets always produce identical bytes.
pub fn write_sqaf<W: Write>(ds: &ModalityDataset, sink: W) -> Result<u64, FormatError> {
    let mut w = CountingWriter { inner: sink, written: 0 };
    w.put(SQAF_MAGIC)?;
    w.put(&SQAF_VERSION.to_le_bytes())?;
    w.put(&to_u32("num_sequences", ds.len())?.to_le_bytes())?;
    w.put(&to_u32("dim", ds.dim())?.to_le_bytes())?;

    let mut buf = Vec::new();
    for seq in ds.sequences() {
        let id = seq.seq_id().as_bytes();
        w.put(&to_u32("seq_id length", id.len())?.to_le_bytes())?;
        w.put(id)?;
        w.put(&to_u32("sequence length", seq.len())?.to_le_bytes())?;
        for chunk in seq.data().chunks(16 * 1024) {
            buf.clear();
            buf.extend(chunk.iter().flat_map(|v| v.to_bits().to_le_bytes()));
            w.put(&buf)?;
        }
    }
    Ok(w.written)
}

/// Reads the whole stream and parses it strictly.
pub fn read_sqaf<R: Read>(mut source: R, modality_name: &str) -> Result<ModalityDataset, FormatError> {
    let mut bytes = Vec::new();
    source
        .read_to_end(&mut bytes)
        .map_err(|source| FormatError::Io { offset: bytes.len() as u64, source })?;
    read_sqaf_bytes(&bytes, modality_name)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8], FormatError> {
        let available = self.bytes.len() - self.pos;
        if n > available {
            return Err(FormatError::Truncated {
                offset: self.pos as u64,
                what,
                expected: n as u64,
                available: available as u64,
            });
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u16(&mut self, what: &'static str) -> Result<u16, FormatError> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &'static str) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }
}

pub fn read_sqaf_bytes(bytes: &[u8], modality_name: impl Into<String>) -> Result<ModalityDataset, FormatError> {
    let mut cur = Cursor { bytes, pos: 0 };
    let magic = cur.take(4, "magic")?;
    if magic != SQAF_MAGIC {
        return Err(FormatError::BadMagic {
            offset: 0,
            found: magic.to_vec(),
        });
    }
    let version_at = cur.pos as u64;
    let version = cur.u16("version")?;
    if version != SQAF_VERSION {
        return Err(FormatError::UnsupportedVersion {
            offset: version_at,
            version,
        });
    }
    let num_sequences = cur.u32("num_sequences")?;
    let dim_at = cur.pos as u64;
    let dim = cur.u32("dim")?;
    if dim == 0 {
        return Err(FormatError::ZeroDim { offset: dim_at });
    }

    // Each sequence needs at least 8 header bytes; cap the reservation.
    let mut sequences = Vec::with_capacity((num_sequences as usize).min(bytes.len() / 8));
    let mut ids = HashSet::new();
    for _ in 0..num_sequences {
        let id_len = cur.u32("seq_id length")? as usize;
        let id_at = cur.pos as u64;
        let id = std::str::from_utf8(cur.take(id_len, "seq_id")?)
            .map_err(|_| FormatError::InvalidSeqId { offset: id_at })?;
        if !ids.insert(id) {
            return Err(FormatError::DuplicateSeqId {
                offset: id_at,
                seq_id: id.to_owned(),
            });
        }
        let len_at = cur.pos as u64;
        let len = cur.u32("sequence length")?;
        let payload_len = (len as u64)
            .checked_mul(dim as u64)
            .and_then(|n| n.checked_mul(4))
            .filter(|&n| n <= usize::MAX as u64)
            .ok_or(FormatError::SizeOverflow { offset: len_at, len, dim })?;
        let payload = cur.take(payload_len as usize, "payload")?;
        let data = payload
            .chunks_exact(4)
            .map(|b| f32::from_bits(u32::from_le_bytes(b.try_into().unwrap())))
            .collect();
        let seq = FeatureSequence::new(id, dim as usize, data).expect("payload is whole rows");
        sequences.push(seq);
    }
    if cur.pos != bytes.len() {
        return Err(FormatError::TrailingBytes {
            offset: cur.pos as u64,
            count: (bytes.len() - cur.pos) as u64,
        });
    }
    ModalityDataset::new(modality_name, dim as usize, sequences)
}
