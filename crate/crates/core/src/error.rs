use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("word length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("word length {0} exceeds the supported maximum of 32 bits")]
    WordTooLong(usize),

    #[error("cannot parse word {0:?}: expected a string of '0' and '1'")]
    Parse(String),

    /// A request that exceeds a documented size limit (enumeration bounds,
    /// qubit budget).
    #[error("capability limit: {0}")]
    Capability(String),

    /// The supplied rows are not linearly independent of the existing checks.
    #[error("dependent rows: {0}")]
    DependentRows(String),

    #[error("invalid construction: {0}")]
    Construction(String),

    #[error("map is not an isometry (max deviation {deviation:.3e})")]
    NotIsometry { deviation: f64 },

    #[error("invalid argument: {0}")]
    Usage(String),
}
