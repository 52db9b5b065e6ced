use std::fmt;

/// Failures of a command, each mapped to a process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, configuration or parameters (exit 2).
    Usage(String),
    /// The computation ran but violated a requested regime or invariant
    /// (exit 2). Outputs already written stay on disk.
    Domain(String),
    /// An acceptance suite did not pass (exit 1).
    Acceptance(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Acceptance(_) => 1,
            CliError::Usage(_) | CliError::Domain(_) | CliError::Io(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(m) => write!(f, "domain error: {m}"),
            CliError::Acceptance(m) => write!(f, "acceptance failure: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<free_jacobi_core::Error> for CliError {
    fn from(e: free_jacobi_core::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<free_jacobi_matsim::MatsimError> for CliError {
    fn from(e: free_jacobi_matsim::MatsimError) -> Self {
        match e {
            free_jacobi_matsim::MatsimError::InvalidConfig(m) => CliError::Usage(m),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
