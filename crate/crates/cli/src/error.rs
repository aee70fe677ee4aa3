use std::path::PathBuf;

use thiserror::Error;

/// Exit codes. These are part of the interface and do not change.
pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_VIOLATED: u8 = 2;
pub const EXIT_TRICHOTOMY: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

/// How a successful run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// A bound was certified.
    Bounded,
    /// `t·s ∈ πZ`: a mathematical verdict, not a failure.
    Violated,
    /// A counterexample passed all three checks.
    Trichotomy,
    /// A counterexample was built but not all checks passed.
    NotConfirmed,
    /// A tool command printed its values.
    Done,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Bounded | Outcome::Done => EXIT_OK,
            Outcome::Violated => EXIT_VIOLATED,
            Outcome::Trichotomy => EXIT_TRICHOTOMY,
            Outcome::NotConfirmed => EXIT_FAILURE,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] lpcrit::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        use lpcrit::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(E::InvalidParameter { .. } | E::Parse(_) | E::IndexOutOfRange { .. }) => EXIT_USAGE,
            CliError::Core(E::Quantization { .. }) => EXIT_VIOLATED,
            _ => EXIT_FAILURE,
        }
    }
}
