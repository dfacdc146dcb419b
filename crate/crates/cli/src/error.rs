use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] hscaler::Error),
}

impl CliError {
    /// 0 success, 1 usage or config, 2 physics validation, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        use hscaler::Error as E;
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Validation(_) => 2,
            CliError::Core(e) => match e {
                E::GenuineSingularity { .. } => 2,
                E::InvalidSpec(_)
                | E::ModeMismatch { .. }
                | E::InvalidGrid(_)
                | E::GridTooSmall(_)
                | E::BadCovariance(_)
                | E::InvalidState(_) => 1,
                E::IntegratorFailure { .. }
                | E::SingularIntegrand { .. }
                | E::QuadratureFailure { .. }
                | E::TimeOutOfRange { .. }
                | E::MirrorNode { .. } => 3,
            },
        }
    }
}
