//! CLI error type carrying the process exit code.

use std::fmt;

pub type CliResult<T> = Result<T, CliError>;

/// What went wrong, split by exit-code contract: configuration and input
/// problems exit 2, numerical failures exit 3.
#[derive(Debug)]
pub enum CliError {
    /// Bad config file, bad input data, missing section, unusable paths.
    Config(String),
    /// The numerics failed: blow-up, failed bracket, failed fit, or a run
    /// that did not converge.
    Numerical(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> CliError {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Numerical(m) => write!(f, "{m}"),
        }
    }
}

impl From<snspd_core::Error> for CliError {
    fn from(e: snspd_core::Error) -> CliError {
        match e {
            snspd_core::Error::Domain(_)
            | snspd_core::Error::Format(_)
            | snspd_core::Error::Io(_) => CliError::Config(e.to_string()),
            snspd_core::Error::Stability(_)
            | snspd_core::Error::Bracket(_)
            | snspd_core::Error::Fit(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Config(e.to_string())
    }
}
