use std::fmt;

/// A failure with its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<rwre::Error> for CliError {
    fn from(e: rwre::Error) -> Self {
        use rwre::Error::*;
        let code = match &e {
            MaxStepsExceeded { .. } | Overflow { .. } | TailNotConverged { .. } => 3,
            EmptyRange => 4,
            Regime { .. } => 5,
            InvalidSpec(_) | Domain { .. } | BracketFailure { .. } | Parse(_) | Io(_) | Json(_) => 2,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        rwre::Error::from(e).into()
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        rwre::Error::from(e).into()
    }
}
