use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("empty bandwidth grid: {0}")]
    EmptyGrid(String),

    /// Both smoothed components vanish, so the angle is unidentifiable.
    #[error("degenerate fit at x = {x}: both smoothed components are zero")]
    DegenerateFit { x: f64 },

    #[error("singular local design at x = {x} (condition number {condition:e})")]
    SingularDesign { x: f64, condition: f64 },

    /// Malformed dataset or scenario content.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid scenario at `{path}`: {message}")]
    Scenario { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn scenario(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Scenario {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for failures a single fit can hit on otherwise valid data.
    pub fn is_fit_failure(&self) -> bool {
        matches!(self, Error::DegenerateFit { .. } | Error::SingularDesign { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
