use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{pointer}: {message}")]
    Input { pointer: String, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Compute(#[from] flagcurv::Error),
}

impl CliError {
    pub fn input(pointer: impl Into<String>, message: impl Into<String>) -> CliError {
        CliError::Input {
            pointer: pointer.into(),
            message: message.into(),
        }
    }

    /// Every error here is an input problem as far as the exit code goes.
    pub fn exit_code(&self) -> u8 {
        2
    }
}
