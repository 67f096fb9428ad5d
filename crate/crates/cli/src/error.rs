use std::fmt;

/// Two failure classes, mapped to distinct exit codes: configuration
/// problems (exit 2) and data/runtime problems (exit 3).
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Data(msg) => write!(f, "data error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Wraps a core error raised while computing or writing results.
pub fn data_err(e: impl fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

pub type CliResult<T> = Result<T, CliError>;
