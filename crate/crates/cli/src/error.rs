use std::path::PathBuf;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Invalid configuration or arguments.
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] bohmtrap::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 for invalid input, 3 when a numerical method missed its target,
    /// 1 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) => 2,
            CliError::Io { .. } | CliError::Csv(_) => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}
