//! Every random draw of the augmentation.
//!
//! Streams are derived from `(master_seed, seq_index, copy_index,
//! modality_ordinal)` through a SplitMix64 chain:
//!
//! ```text
//! s1 = SM(master_seed ^ seq_index)
//! s2 = SM(s1 ^ copy_index)
//! s3 = SM(s2 ^ modality_ordinal)
//! ```
//!
//! where `SM(x)` is the first output of a SplitMix64 generator whose state
//! is `x`. The xoshiro256** state is then filled with the next four outputs
//! of a SplitMix64 generator seeded with `s3`.
//!
//! Integer draws (address subsets, permutations) are bit-exact given the
//! stream. Beta and normal variates come from `rand_distr` and are only
//! reproducible within this implementation.
//!
//! Within one plan the draws happen in a fixed order: fraction, addresses,
//! permutation.

use rand_core::RngCore;
use rand_distr::{Beta, Distribution, StandardNormal};

use crate::config::SelectionDistribution;
use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// One step of SplitMix64: advances `state` and returns the mixed output.
#[inline]
pub fn splitmix64_next(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN_GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn splitmix64(seed: u64) -> u64 {
    let mut state = seed;
    splitmix64_next(&mut state)
}

/// Where a stream came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Provenance {
    pub master_seed: u64,
    pub seq_index: u64,
    pub copy_index: u64,
    pub modality_ordinal: u64,
}

/// A xoshiro256** generator tagged with its provenance.
///
/// Single owner; parallel workers derive their own streams.
#[derive(Debug, Clone)]
pub struct RngStream {
    state: [u64; 4],
    provenance: Provenance,
}

impl RngStream {
    pub fn from_provenance(provenance: Provenance) -> Self {
        let s1 = splitmix64(provenance.master_seed ^ provenance.seq_index);
        let s2 = splitmix64(s1 ^ provenance.copy_index);
        let mut sm = splitmix64(s2 ^ provenance.modality_ordinal);
        let state = [
            splitmix64_next(&mut sm),
            splitmix64_next(&mut sm),
            splitmix64_next(&mut sm),
            splitmix64_next(&mut sm),
        ];
        RngStream { state, provenance }
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.state;
        let result = s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Unbiased draw from `0..n`: 64-bit outputs at or above
    /// `2^64 - (2^64 mod n)` are rejected, the rest reduced modulo `n`.
    #[inline]
    pub fn bounded_uniform(&mut self, n: u64) -> u64 {
        assert!(n > 0, "bounded_uniform needs a non-empty range");
        // 2^64 mod n, computed without 128-bit arithmetic
        let rem = n.wrapping_neg() % n;
        let limit = u64::MAX - rem;
        loop {
            let x = self.next_u64();
            if x <= limit {
                return x % n;
            }
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        (RngStream::next_u64(self) >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        RngStream::next_u64(self)
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        rand_core::impls::fill_bytes_via_next(self, dst)
    }
}

pub fn derive_stream(master_seed: u64, seq_index: u64, copy_index: u64, modality_ordinal: u64) -> RngStream {
    RngStream::from_provenance(Provenance {
        master_seed,
        seq_index,
        copy_index,
        modality_ordinal,
    })
}

/// Draws the fraction of addresses to permute. The result is in `[0, 1]`.
///
/// `dist` must be valid; an invalid Beta shape panics.
pub fn draw_fraction(dist: &SelectionDistribution, rng: &mut RngStream) -> f64 {
    match *dist {
        SelectionDistribution::Beta { alpha } => {
            let beta = Beta::new(alpha, alpha).expect("beta shape validated by config");
            beta.sample(rng).clamp(0.0, 1.0)
        }
        SelectionDistribution::FoldedNormal { mu, sigma } => {
            let z: f64 = StandardNormal.sample(rng);
            (mu + sigma * z).abs().min(1.0)
        }
        SelectionDistribution::Fixed { p } => p,
    }
}

/// Number of addresses selected by fraction `p` out of `dim`:
/// `round_half_up(p * dim)`, clamped to `[0, dim]`.
pub fn fraction_to_count(p: f64, dim: usize) -> usize {
    let p = if p.is_nan() { 0.0 } else { p.clamp(0.0, 1.0) };
    let k = (p * dim as f64 + 0.5).floor() as usize;
    k.min(dim)
}

/// A uniform `k`-subset of `0..dim`, ascending.
///
/// Runs the first `k` steps of a forward Fisher-Yates shuffle over
/// `0..dim` (slot `i` swaps with `i + bounded_uniform(dim - i)`) and sorts
/// the selected prefix.
pub fn sample_addresses(k: usize, dim: usize, rng: &mut RngStream) -> Result<Vec<usize>> {
    if k > dim {
        return Err(Error::TooManyAddresses { k, dim });
    }
    if k == dim {
        return Ok((0..dim).collect());
    }
    let mut slots: Vec<usize> = (0..dim).collect();
    for i in 0..k {
        let j = i + rng.bounded_uniform((dim - i) as u64) as usize;
        slots.swap(i, j);
    }
    slots.truncate(k);
    slots.sort_unstable();
    Ok(slots)
}

/// A uniform permutation of `0..len` by Fisher-Yates from the top:
/// for `i` in `len-1 ..= 1`, swap `i` with `bounded_uniform(i + 1)`.
///
/// The identity is a legal outcome and is not redrawn.
pub fn sample_permutation(len: usize, rng: &mut RngStream) -> Vec<usize> {
    let mut pi: Vec<usize> = (0..len).collect();
    for i in (1..len).rev() {
        let j = rng.bounded_uniform(i as u64 + 1) as usize;
        pi.swap(i, j);
    }
    pi
}
