use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Carries the (zero) determinant rendered as a string.
    #[error("singular matrix (determinant {det})")]
    Singular { det: String },

    #[error("zero diagonal entry at index {index}")]
    ZeroDiagonal { index: usize },

    #[error("extent error: {0}")]
    Extent(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("consistency failure: {0}")]
    Consistency(String),

    #[error("assumption violated: {0}")]
    Assumption(String),

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("structural failure: {0}")]
    Structural(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable tag, used in JSON error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::Singular { .. } => "singular",
            Error::ZeroDiagonal { .. } => "zero_diagonal",
            Error::Extent(_) => "extent",
            Error::Capacity(_) => "capacity",
            Error::Domain(_) => "domain",
            Error::Consistency(_) => "consistency",
            Error::Assumption(_) => "assumption",
            Error::Quadrature(_) => "quadrature",
            Error::Structural(_) => "structural",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
