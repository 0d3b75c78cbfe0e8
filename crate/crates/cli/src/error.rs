use std::fmt;
use std::process::ExitCode;

/// Failure classes with stable exit codes.
#[derive(Debug)]
pub enum CliError {
    /// An invariant check did not pass.
    Invariant(String),
    BadArgs(String),
    Io(String),
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Invariant(_) => 1,
            CliError::BadArgs(_) => 2,
            CliError::Io(_) => 3,
            CliError::Solver(_) => 4,
        })
    }

    pub fn io(context: impl fmt::Display, err: impl fmt::Display) -> Self {
        CliError::Io(format!("{context}: {err}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invariant(m) => write!(f, "invariant check failed: {m}"),
            CliError::BadArgs(m) => write!(f, "invalid arguments: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Solver(m) => write!(f, "solver error: {m}"),
        }
    }
}

impl From<dadcf::Error> for CliError {
    fn from(e: dadcf::Error) -> Self {
        use dadcf::Error as E;
        let msg = e.to_string();
        match e {
            E::InvalidSize(..)
            | E::KindMismatch { .. }
            | E::DimensionMismatch(_)
            | E::IndexOutOfRange { .. }
            | E::InvalidArgument(_) => CliError::BadArgs(msg),
            E::NotOrthogonal(_) | E::NullSpace { .. } | E::Inconsistent(_) => {
                CliError::Invariant(msg)
            }
            E::Format { .. } | E::Io(_) | E::Json(_) => CliError::Io(msg),
            E::StepSize(_) | E::Diverged { .. } => CliError::Solver(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
