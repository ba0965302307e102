use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Schema or value violation in the run configuration or its inputs.
    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    pub(crate) fn config(path: &str, msg: impl std::fmt::Display) -> Self {
        CliError::Config(format!("{path}: {msg}"))
    }

    /// Wraps a core error raised while handling config field `path`.
    pub(crate) fn core(path: &str, err: qnoise_core::Error) -> Self {
        match err {
            qnoise_core::Error::NoConvergence(_) => CliError::Numerical(format!("{path}: {err}")),
            other => CliError::config(path, other),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
