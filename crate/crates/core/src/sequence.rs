//! Feature sequences and the materialized randomness applied to them.

use crate::error::{Error, Result};

/// One modality's `T x d` feature matrix for one sample, stored time-major.
///
/// Values are opaque 32-bit patterns: equality is bitwise, so NaN payloads
/// compare equal to themselves and `0.0 != -0.0`.
#[derive(Debug, Clone)]
pub struct FeatureSequence {
    seq_id: String,
    dim: usize,
    data: Vec<f32>,
}

impl FeatureSequence {
    /// `data` must hold a whole number of rows of width `dim`.
    pub fn new(seq_id: impl Into<String>, dim: usize, data: Vec<f32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDim);
        }
        if data.len() % dim != 0 {
            return Err(Error::RaggedData { len: data.len(), dim });
        }
        Ok(FeatureSequence {
            seq_id: seq_id.into(),
            dim,
            data,
        })
    }

    pub fn empty(seq_id: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new(seq_id, dim, Vec::new())
    }

    pub fn seq_id(&self) -> &str {
        &self.seq_id
    }

    /// Number of timesteps `T`.
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    pub fn row(&self, t: usize) -> &[f32] {
        &self.data[t * self.dim..(t + 1) * self.dim]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f32> {
        self.data.chunks_exact(self.dim)
    }

    pub fn value(&self, t: usize, address: usize) -> f32 {
        self.data[t * self.dim + address]
    }

    /// Column `address` across all timesteps.
    pub fn column(&self, address: usize) -> impl Iterator<Item = f32> + '_ {
        assert!(address < self.dim, "address {address} out of range for dim {}", self.dim);
        self.data.iter().skip(address).step_by(self.dim).copied()
    }

    pub fn with_seq_id(mut self, seq_id: impl Into<String>) -> Self {
        self.seq_id = seq_id.into();
        self
    }

    pub fn bit_eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.data.len() == other.data.len()
            && self.data.iter().zip(&other.data).all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl PartialEq for FeatureSequence {
    fn eq(&self, other: &Self) -> bool {
        self.seq_id == other.seq_id && self.bit_eq(other)
    }
}

impl Eq for FeatureSequence {}

/// The randomness of one augmentation event: the drawn fraction, the
/// selected feature addresses and the temporal permutation.
///
/// Applying the plan moves `in[pi[t]][a]` to `out[t][a]` for every selected
/// address `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentPlan {
    p: f64,
    addresses: Vec<usize>,
    pi: Vec<usize>,
}

impl AugmentPlan {
    /// Checks that `p` is in `[0, 1]`, `addresses` is strictly ascending and
    /// `pi` is a bijection of `0..pi.len()`.
    pub fn new(p: f64, addresses: Vec<usize>, pi: Vec<usize>) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidPlan(format!("fraction {p} out of [0, 1]")));
        }
        if let Some(w) = addresses.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPlan(format!(
                "addresses not strictly ascending ({} then {})",
                w[0], w[1]
            )));
        }
        let mut seen = vec![false; pi.len()];
        for (t, &src) in pi.iter().enumerate() {
            match seen.get_mut(src) {
                Some(slot) if !*slot => *slot = true,
                Some(_) => {
                    return Err(Error::InvalidPlan(format!(
                        "pi is not a bijection: {src} repeated at position {t}"
                    )))
                }
                None => {
                    return Err(Error::InvalidPlan(format!(
                        "pi is not a bijection: {src} at position {t} exceeds length {}",
                        pi.len()
                    )))
                }
            }
        }
        Ok(AugmentPlan { p, addresses, pi })
    }

    /// Caller guarantees the invariants of [`AugmentPlan::new`].
    pub(crate) fn from_parts(p: f64, addresses: Vec<usize>, pi: Vec<usize>) -> Self {
        debug_assert!(AugmentPlan::new(p, addresses.clone(), pi.clone()).is_ok());
        AugmentPlan { p, addresses, pi }
    }

    pub fn fraction(&self) -> f64 {
        self.p
    }

    pub fn addresses(&self) -> &[usize] {
        &self.addresses
    }

    pub fn permutation(&self) -> &[usize] {
        &self.pi
    }

    /// Whether applying the plan cannot change any value.
    pub fn is_identity(&self) -> bool {
        self.addresses.is_empty() || self.pi.iter().enumerate().all(|(t, &s)| t == s)
    }

    /// Errors unless the plan fits a sequence of shape `len x dim`.
    pub fn check_shape(&self, len: usize, dim: usize) -> Result<()> {
        let max_address = self.addresses.last().copied();
        if self.pi.len() != len || max_address.is_some_and(|a| a >= dim) {
            return Err(Error::ShapeMismatch {
                plan_len: self.pi.len(),
                max_address,
                seq_len: len,
                dim,
            });
        }
        Ok(())
    }
}

/// Binds a plan to the (sequence, copy, modality) it was applied to.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanLogRecord {
    pub seq_id: String,
    pub copy_index: u64,
    pub modality: String,
    pub plan: AugmentPlan,
}
