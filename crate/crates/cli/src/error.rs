use seqaug_core::{Error as CoreError, FormatError};

pub type Result<T, E = CliError> = std::result::Result<T, E>;

/// Command failures, split by exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad configuration, mismatched inputs or failed verification (exit 1).
    #[error("{0}")]
    Validation(String),
    /// Unreadable, unwritable or unparsable files (exit 2).
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
        }
    }

    pub fn io(context: impl std::fmt::Display, err: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{context}: {err}"))
    }

    /// Prefixes the message, keeping the exit class.
    pub fn context(self, context: impl std::fmt::Display) -> Self {
        match self {
            CliError::Validation(m) => CliError::Validation(format!("{context}: {m}")),
            CliError::Io(m) => CliError::Io(format!("{context}: {m}")),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::ConfigSyntax(_) => CliError::Io(err.to_string()),
            CoreError::Format(f) => f.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(err: FormatError) -> Self {
        match err {
            FormatError::InvalidPlan { .. } | FormatError::Dataset(_) => CliError::Validation(err.to_string()),
            other => CliError::Io(other.to_string()),
        }
    }
}
