use std::fmt;

use chopstick_core::workspace::FailureKind;
use chopstick_core::IkError;
use serde::Serialize;

/// A failure that maps to exit code 1. Usage errors never get here; clap
/// exits with 2 on its own.
#[derive(Debug, Serialize)]
pub struct CliError {
    /// Stable snake_case class, e.g. `out_of_reach` or `io`.
    pub error: String,
    pub message: String,
}

impl CliError {
    pub fn new(kind: &str, message: impl fmt::Display) -> Self {
        Self {
            error: kind.to_owned(),
            message: message.to_string(),
        }
    }

    pub fn io(path: &std::path::Path, e: impl fmt::Display) -> Self {
        Self::new("io", format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<IkError> for CliError {
    fn from(e: IkError) -> Self {
        Self::new(FailureKind::of(&e).as_str(), e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::new("io", e)
    }
}

/// Tags any displayable error with `kind`.
pub trait Context<T> {
    fn kind(self, kind: &str) -> Result<T, CliError>;
}

impl<T, E: fmt::Display> Context<T> for Result<T, E> {
    fn kind(self, kind: &str) -> Result<T, CliError> {
        self.map_err(|e| CliError::new(kind, e))
    }
}
