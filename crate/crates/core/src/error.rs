use thiserror::Error;

/// Errors raised by the library operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("ground set of size {size} exceeds the limit {max} for this operation")]
    GroundSetTooLarge { size: usize, max: usize },

    #[error("graph on {n} vertices exceeds the limit {max} for this operation")]
    TooLarge { n: usize, max: usize },

    #[error("family is trivial (empty or the full power set)")]
    TrivialFamily,

    #[error("family is not monotone: {0}")]
    NotMonotone(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("LP solution failed validation: {0}")]
    LpNumericalFailure(String),

    #[error("graph is not bipartite")]
    NotBipartite,

    #[error("p = {p} exceeds the admissible maximum {max}")]
    PTooLarge { p: f64, max: f64 },

    #[error("invalid probability {0}")]
    InvalidP(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Malformed(e.to_string())
    }
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidP(p))
    }
}
