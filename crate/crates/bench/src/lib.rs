//! Shared fixtures for the criterion benches.

use seqaug_core::{derive_stream, FeatureSequence, ModalityDataset};

/// A `len x dim` sequence of seeded values in `[0, 1)`.
pub fn sequence(seq_id: &str, len: usize, dim: usize, seed: u64) -> FeatureSequence {
    let mut rng = derive_stream(seed, 0, u64::MAX, 0);
    let data = (0..len * dim)
        .map(|_| (rng.next_u64() >> 40) as f32 / (1u64 << 24) as f32)
        .collect();
    FeatureSequence::new(seq_id, dim, data).unwrap()
}

pub fn dataset(num: usize, len: usize, dim: usize) -> ModalityDataset {
    let seqs = (0..num)
        .map(|i| sequence(&format!("seq-{i}"), len, dim, i as u64))
        .collect();
    ModalityDataset::new("bench", dim, seqs).unwrap()
}
