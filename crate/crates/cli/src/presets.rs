//! Named configurations with the best-found hyperparameters for the
//! text / audio / visual feature streams of CMU-MOSEI.
//!
//! `mult-mosei` targets transformer models (Beta fractions), the
//! `mmrnn-*` presets target recurrent models (folded-normal fractions with
//! sigma 0.01).

use seqaug_core::{ModalityConfig, SelectionDistribution};

pub const TEXT: &str = "text";
pub const AUDIO: &str = "audio";
pub const VISUAL: &str = "visual";

pub const PRESET_NAMES: &[&str] = &[
    "mult-mosei",
    "mmrnn-mosei",
    "mmrnn-unimodal-t",
    "mmrnn-unimodal-a",
    "mmrnn-unimodal-v",
];

pub fn preset(name: &str) -> Option<Vec<ModalityConfig>> {
    let beta = |alpha| SelectionDistribution::Beta { alpha };
    let folded = SelectionDistribution::folded_normal;
    let modalities = match name {
        "mult-mosei" => vec![
            ModalityConfig::new(TEXT, beta(1.0)),
            ModalityConfig::new(AUDIO, beta(0.1)),
            ModalityConfig::new(VISUAL, beta(1.0)),
        ],
        "mmrnn-mosei" => vec![
            ModalityConfig::new(TEXT, folded(0.15)),
            ModalityConfig::new(AUDIO, folded(0.1)),
            ModalityConfig::new(VISUAL, folded(0.2)),
        ],
        "mmrnn-unimodal-t" => vec![ModalityConfig::new(TEXT, folded(0.15))],
        "mmrnn-unimodal-a" => vec![ModalityConfig::new(AUDIO, folded(0.4))],
        "mmrnn-unimodal-v" => vec![ModalityConfig::new(VISUAL, folded(0.35))],
        _ => return None,
    };
    Some(modalities)
}
