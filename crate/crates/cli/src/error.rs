use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qfchub_core::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// 2 for bad input, 3 when the numerics could not produce an answer.
    pub fn exit_code(&self) -> i32 {
        use qfchub_core::Error as E;
        match self {
            CliError::Core(E::Degenerate(_) | E::Singularity(_) | E::Convergence { .. }) => 3,
            CliError::Usage(_) | CliError::Core(_) => 2,
            CliError::Io(_) => 2,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
