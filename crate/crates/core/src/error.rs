use crate::config::Violation;
use crate::io::FormatError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {}", join(.0))]
    InvalidConfig(Vec<Violation>),

    #[error("malformed configuration: {0}")]
    ConfigSyntax(#[from] serde_json::Error),

    #[error(
        "plan shape (pi length {plan_len}, max address {max_address:?}) does not fit sequence of shape {seq_len}x{dim}"
    )]
    ShapeMismatch {
        plan_len: usize,
        max_address: Option<usize>,
        seq_len: usize,
        dim: usize,
    },

    #[error("cannot select {k} addresses out of {dim}")]
    TooManyAddresses { k: usize, dim: usize },

    #[error("sequence data holds {len} values, which is not a multiple of dim {dim}")]
    RaggedData { len: usize, dim: usize },

    #[error("feature dimensionality must be at least 1")]
    ZeroDim,

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("modality `{0}` is configured but missing from the sample")]
    MissingModality(String),

    #[error(transparent)]
    Format(#[from] FormatError),
}

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
