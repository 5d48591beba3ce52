use oscibo_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver did not converge: {0}")]
    NoConvergence(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("verification failed: {0} check(s) failed")]
    VerifyFailed(usize),
}

impl CliError {
    pub fn from_core(e: CoreError) -> Self {
        match e {
            CoreError::NoConvergence { .. } => Self::NoConvergence(e.to_string()),
            other => Self::Config(other.to_string()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::VerifyFailed(_) => 1,
            Self::Config(_) => 2,
            Self::NoConvergence(_) => 3,
            Self::Io(_) => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        Self::from_core(e)
    }
}
