use std::fmt;
use std::io;
use std::path::PathBuf;

use flatsol_core::Error as CoreError;

use crate::config::ConfigError;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(ConfigError),
    Io(PathBuf, io::Error),
    Core(CoreError),
}

impl CliError {
    /// 1 for usage, config and validation errors; 2 when a hypothesis fails.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if is_verdict(e) => 2,
            _ => 1,
        }
    }
}

/// Errors that report a mathematical outcome rather than bad input.
pub fn is_verdict(e: &CoreError) -> bool {
    matches!(
        e,
        CoreError::PrerequisiteFailed(_)
            | CoreError::CertificateFailed { .. }
            | CoreError::SubsolutionCheckFailed { .. }
            | CoreError::PositivityPrerequisiteFailed { .. }
            | CoreError::BracketViolated { .. }
            | CoreError::NotFlat { .. }
    )
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Config(e) => write!(f, "config: {e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}
