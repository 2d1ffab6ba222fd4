//! Command-line front end for `wright-core`: oracle evaluation, asymptotic
//! expansions, saddle diagnostics and regeneration of the reference tables.

pub mod args;
pub mod commands;
pub mod output;
pub mod reference;
pub mod tables;

use thiserror::Error;
use wright_core::WrightError;

pub const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (", env!("WRIGHT_GIT_DESCRIBE"), ")");

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Wright(#[from] WrightError),

    #[error("{0} table cell(s) deviate from the reference values")]
    Mismatch(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

impl CliError {
    /// 0 ok, 2 domain, 3 precision, 4 regime/boundary, 5 table mismatch, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Wright(e) => match e {
                WrightError::Domain(_) | WrightError::NoRealSaddle { .. } | WrightError::NoBoundary { .. } => 2,
                WrightError::PrecisionLoss { .. } | WrightError::NoConvergence { .. } => 3,
                WrightError::WrongRegime { .. } | WrightError::OnStokesBoundary { .. } => 4,
                WrightError::DegenerateSaddle(_) => 4,
                WrightError::ConvergenceFailure(_) | WrightError::StepFailure { .. } => 1,
            },
            CliError::Usage(_) => 2,
            CliError::Mismatch(_) => 5,
            CliError::Io(_) | CliError::Other(_) => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
