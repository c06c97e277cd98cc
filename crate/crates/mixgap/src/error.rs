use std::path::PathBuf;

use mixgap_core::Error as CoreError;

/// Everything a command can fail with, mapped onto exit codes by [`CliError::exit_code`].
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// A file that parses as JSON but does not fit the expected shape.
    #[error("{path}: field `{field}`: {message}")]
    Schema { path: String, field: String, message: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Core(#[from] CoreError),
    #[error("promise violated: {0}")]
    Promise(String),
}

impl CliError {
    /// 2 for promise violations (including a mixing time that never
    /// resolves), 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Promise(_) | CliError::Core(CoreError::PromiseViolation(_) | CoreError::Unresolved { .. }) => 2,
            _ => 1,
        }
    }

    pub fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Schema { path: String::new(), field: field.into(), message: message.into() }
    }

    /// Attaches a file name to a schema error.
    pub fn in_file(self, file: &str) -> Self {
        match self {
            CliError::Schema { field, message, .. } => CliError::Schema { path: file.to_string(), field, message },
            other => other,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
