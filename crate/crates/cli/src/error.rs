use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("{}: {message}", path.display())]
    Input { path: PathBuf, message: String },

    #[error("non-finite {metric} at iteration {iteration} of {run}")]
    NonFinite {
        metric: &'static str,
        iteration: usize,
        run: String,
    },

    #[error("{}: {source}", path.display())]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{0}")]
    Verify(String),

    #[error(transparent)]
    Library(#[from] symcone::Error),
}

impl CliError {
    /// Stable machine-readable category.
    pub fn kind(&self) -> &'static str {
        use symcone::Error as E;
        match self {
            CliError::Config(_) => "config",
            CliError::Input { .. } => "input",
            CliError::NonFinite { .. } => "non_finite",
            CliError::Output { .. } => "output",
            CliError::Verify(_) => "verify",
            CliError::Library(e) => match e {
                E::DimensionMismatch(_) | E::DescriptorMismatch { .. } => "dimension_mismatch",
                E::NonFinite(_) => "non_finite",
                E::Dataset(_) | E::Io(_) => "input",
                E::GapBoundViolated { .. } => "gap_bound_violated",
                E::AdjointMismatch { .. } => "invalid_game",
                _ => "invalid_parameter",
            },
        }
    }

    /// The JSON object printed on stderr before a nonzero exit.
    pub fn record(&self) -> serde_json::Value {
        json!({ "error": self.kind(), "message": self.to_string() })
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
