use std::path::Path;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] flagdyn_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0} of {1} checks failed")]
    ChecksFailed(usize, usize),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.display().to_string(), source }
    }

    /// Process exit code: 2 for bad input, 3 for numerically singular input.
    pub fn exit_code(&self) -> u8 {
        use flagdyn_core::Error as E;
        match self {
            Self::Usage(_) => 2,
            Self::Core(E::NumericalRank { .. }) => 3,
            Self::Core(E::InvalidDeterminant { .. } | E::Dimension(_) | E::UnsupportedSpace(_)) => 2,
            Self::Core(_) | Self::Io { .. } | Self::ChecksFailed(..) => 1,
        }
    }
}
