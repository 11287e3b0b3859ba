//! Augmentation settings: the fraction distribution of each modality, the
//! train/inference gate, the master seed and the replica count.
//!
//! The JSON form is parsed strictly; unknown keys are an error.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default deviation of the folded normal.
pub const DEFAULT_FOLDED_NORMAL_SIGMA: f64 = 0.01;

/// Law of the fraction `p` of feature addresses selected for permutation.
///
/// `Beta` has a single shape parameter used for both shapes, so an
/// asymmetric Beta cannot be expressed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SelectionDistribution {
    Beta { alpha: f64 },
    /// `|mu + sigma * Z|` clamped into `[0, 1]`.
    FoldedNormal { mu: f64, sigma: f64 },
    /// Always `p`; consumes no randomness.
    Fixed { p: f64 },
}

impl SelectionDistribution {
    pub fn folded_normal(mu: f64) -> Self {
        SelectionDistribution::FoldedNormal {
            mu,
            sigma: DEFAULT_FOLDED_NORMAL_SIGMA,
        }
    }

    /// Parameter problems of this distribution, attributed to `modality`.
    pub fn violations(&self, modality: &str) -> Vec<Violation> {
        let modality = modality.to_owned();
        let mut out = Vec::new();
        match *self {
            SelectionDistribution::Beta { alpha } => {
                if !(alpha.is_finite() && alpha > 0.0) {
                    out.push(Violation::BetaAlpha { modality, alpha });
                }
            }
            SelectionDistribution::FoldedNormal { mu, sigma } => {
                if !(0.0..=1.0).contains(&mu) {
                    out.push(Violation::FoldedNormalMu {
                        modality: modality.clone(),
                        mu,
                    });
                }
                if !(sigma.is_finite() && sigma > 0.0) {
                    out.push(Violation::FoldedNormalSigma { modality, sigma });
                }
            }
            SelectionDistribution::Fixed { p } => {
                if !(0.0..=1.0).contains(&p) {
                    out.push(Violation::FixedP { modality, p });
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.violations("").is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModalityConfig {
    pub name: String,
    pub dist: SelectionDistribution,
}

impl ModalityConfig {
    pub fn new(name: impl Into<String>, dist: SelectionDistribution) -> Self {
        ModalityConfig {
            name: name.into(),
            dist,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Train,
    /// Augmentation is the identity map.
    Inference,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Mode::Train),
            "inference" => Ok(Mode::Inference),
            other => Err(format!("unknown mode `{other}` (expected `train` or `inference`)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Train => "train",
            Mode::Inference => "inference",
        })
    }
}

/// Full augmentation configuration.
///
/// The position of a modality in `modalities` is its ordinal, which feeds
/// stream derivation. Reordering modalities therefore changes the draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AugmentConfig {
    pub mode: Mode,
    pub master_seed: u64,
    pub copies: u32,
    pub modalities: Vec<ModalityConfig>,
}

impl AugmentConfig {
    /// Parses the JSON form. Does not validate parameter ranges.
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization is infallible")
    }

    /// Returns `self` if [`validate_config`] reports nothing.
    pub fn validated(self) -> Result<Self> {
        let violations = validate_config(&self);
        if violations.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidConfig(violations))
        }
    }

    pub fn ordinal_of(&self, modality: &str) -> Option<usize> {
        self.modalities.iter().position(|m| m.name == modality)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoModalities,
    ZeroCopies,
    EmptyModalityName { index: usize },
    DuplicateModalityName(String),
    BetaAlpha { modality: String, alpha: f64 },
    FoldedNormalMu { modality: String, mu: f64 },
    FoldedNormalSigma { modality: String, sigma: f64 },
    FixedP { modality: String, p: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoModalities => write!(f, "at least one modality must be configured"),
            Violation::ZeroCopies => write!(f, "copies must be at least 1"),
            Violation::EmptyModalityName { index } => {
                write!(f, "modality #{index} has an empty name")
            }
            Violation::DuplicateModalityName(name) => {
                write!(f, "duplicate modality name `{name}`")
            }
            Violation::BetaAlpha { modality, alpha } => {
                write!(f, "modality `{modality}`: beta alpha {alpha} must be finite and > 0")
            }
            Violation::FoldedNormalMu { modality, mu } => {
                write!(f, "modality `{modality}`: folded normal mu {mu} out of [0, 1]")
            }
            Violation::FoldedNormalSigma { modality, sigma } => {
                write!(f, "modality `{modality}`: folded normal sigma {sigma} must be finite and > 0")
            }
            Violation::FixedP { modality, p } => {
                write!(f, "modality `{modality}`: fixed p {p} out of [0, 1]")
            }
        }
    }
}

/// Every violated invariant of `cfg`; empty iff the config can be executed.
pub fn validate_config(cfg: &AugmentConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    if cfg.modalities.is_empty() {
        out.push(Violation::NoModalities);
    }
    if cfg.copies == 0 {
        out.push(Violation::ZeroCopies);
    }
    let mut seen = HashSet::new();
    let mut reported = HashSet::new();
    for (index, m) in cfg.modalities.iter().enumerate() {
        if m.name.is_empty() {
            out.push(Violation::EmptyModalityName { index });
        } else if !seen.insert(m.name.as_str()) && reported.insert(m.name.as_str()) {
            out.push(Violation::DuplicateModalityName(m.name.clone()));
        }
        out.extend(m.dist.violations(&m.name));
    }
    out
}
