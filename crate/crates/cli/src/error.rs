use std::path::PathBuf;

use sgdg::evidence::EvidenceError;
use sgdg::inference::InferenceError;
use sgdg::sgdg::SgdgError;
use sgdg::GraphError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    InvalidConfig(String),
    #[error("{0}")]
    InvalidParams(String),
    #[error("traces were fitted to different data: {0}")]
    DataMismatch(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] SgdgError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error(transparent)]
    Evidence(#[from] EvidenceError),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        CliError::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }

    /// Stable machine-readable category, printed on stderr.
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Parse { .. } => "parse",
            CliError::Data(_) => "data",
            CliError::InvalidConfig(_) => "invalid_config",
            CliError::InvalidParams(_) => "invalid_params",
            CliError::DataMismatch(_) => "data_mismatch",
            CliError::Graph(_) => "graph",
            CliError::Model(_) => "invalid_params",
            CliError::Inference(e) => match e {
                InferenceError::ProprietyViolation(_) => "propriety_violation",
                InferenceError::NotDecomposable | InferenceError::NotPerfectOrdering => "graph",
                InferenceError::InvalidPrior(_)
                | InferenceError::InvalidConfig(_)
                | InferenceError::ImproperPrior => "invalid_config",
                InferenceError::DimensionMismatch(_) => "data",
                InferenceError::Io(_) => "io",
                InferenceError::Json(_) | InferenceError::TraceFormat(_) => "parse",
                _ => "numerical",
            },
            CliError::Evidence(EvidenceError::NotConverged { .. }) => "not_converged",
            CliError::Evidence(_) => "evidence",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.category() {
            "invalid_config" => 2,
            "propriety_violation" => 3,
            _ => 1,
        }
    }
}
