use birkdist_core::Error as CoreError;
use thiserror::Error;

/// Process exit codes. Stable across releases.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const PRECONDITION: i32 = 3;
    pub const NUMERICAL: i32 = 4;
    pub const UNSUPPORTED: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Every violation found by `validate`, reported together.
    #[error("{} violation(s):\n  - {}", .0.len(), .0.join("\n  - "))]
    Violations(Vec<String>),

    #[error("report: {0}")]
    Report(String),

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => exit::IO,
            CliError::Config(_) | CliError::Violations(_) | CliError::Report(_) => exit::CONFIG,
            CliError::Core(e) => match e {
                CoreError::InvalidInput(_) | CoreError::OutsideInterval { .. } => exit::CONFIG,
                CoreError::Precondition(_) => exit::PRECONDITION,
                CoreError::Numerical(_) => exit::NUMERICAL,
                CoreError::Unsupported(_) => exit::UNSUPPORTED,
            },
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
