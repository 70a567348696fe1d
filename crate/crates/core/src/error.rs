use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or unreadable input.
    #[error("input error: {0}")]
    Input(String),
    /// A value outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Inconsistent configuration or parameters.
    #[error("config error: {0}")]
    Config(String),
    /// A hypothesis of the partition theorem does not hold.
    #[error("hypothesis failure [{condition}]: {detail}")]
    Hypothesis { condition: String, detail: String },
    /// A constant could not be extracted.
    #[error("extraction failure in {stage}: {detail}")]
    Extraction { stage: String, detail: String },
    /// An empirical check of a certificate failed.
    #[error("validation failure: {0}")]
    Validation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn hypothesis(condition: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Hypothesis {
            condition: condition.into(),
            detail: detail.into(),
        }
    }

    pub(crate) fn extraction(stage: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Extraction {
            stage: stage.into(),
            detail: detail.into(),
        }
    }

    /// Process exit code used by the command line.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_)
            | Error::Domain(_)
            | Error::Config(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
            Error::Hypothesis { .. } | Error::Extraction { .. } => 3,
            Error::Validation(_) => 4,
        }
    }
}
