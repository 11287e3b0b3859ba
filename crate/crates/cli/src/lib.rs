//! Library side of the `seqaug` command: each subcommand is a plain
//! function so tests and other tools can drive it without a process.

pub mod augment;
pub mod bench;
mod error;
pub mod inspect;
pub mod presets;
pub mod verify;

pub use error::{CliError, Result};
