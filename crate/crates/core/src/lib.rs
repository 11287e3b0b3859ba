//! Sequence feature augmentation by temporal resampling.
//!
//! Each augmentation picks a fraction `p` of the feature dimensions
//! ("feature addresses") of a `T x d` feature sequence and moves the values
//! of exactly those columns along the time axis with one shared permutation.
//! Every other column is left untouched, so augmented sequences are built
//! purely from values that already occur in the same column of the same
//! sequence.
//!
//! The crate is split into:
//!
//! * [`config`]: distributions, per-modality settings and validation,
//! * [`sequence`]: feature sequences, plans and plan log records,
//! * [`sampling`]: seeded streams and every random draw,
//! * [`engine`]: plan construction, plan application and the
//!   multimodal/mode-gated driver,
//! * [`io`]: the SQAF container, CSV ingest and the JSONL plan log.
//!
//! ```
//! use seqaug_core::{augment_sequence, derive_stream, FeatureSequence, SelectionDistribution};
//!
//! let seq = FeatureSequence::new("utt-1", 3, (0..18).map(|v| v as f32).collect()).unwrap();
//! let mut rng = derive_stream(42, 0, 0, 0);
//! let (out, plan) = augment_sequence(&seq, &SelectionDistribution::Fixed { p: 0.35 }, &mut rng).unwrap();
//! assert_eq!(plan.addresses().len(), 1);
//! assert_eq!(out.len(), 6);
//! ```

pub mod config;
pub mod engine;
mod error;
pub mod io;
pub mod sampling;
pub mod sequence;

pub use config::{validate_config, AugmentConfig, Mode, ModalityConfig, SelectionDistribution, Violation};
pub use engine::{augment_sample, augment_sequence, apply_plan, make_plan, MultimodalSample};
pub use error::{Error, Result};
pub use io::{FormatError, ModalityDataset};
pub use sampling::{
    derive_stream, draw_fraction, fraction_to_count, sample_addresses, sample_permutation, Provenance,
    RngStream,
};
pub use sequence::{AugmentPlan, FeatureSequence, PlanLogRecord};

/// Semantic version of the augmentation engine.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
