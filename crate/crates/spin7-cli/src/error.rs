use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config or output path: exit code 1.
    #[error("{0}")]
    Usage(String),
    /// The numerics failed or a check did not pass: exit code 2.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<spin7::Error> for CliError {
    fn from(e: spin7::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}
