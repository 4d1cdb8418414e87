//! Shared error type for the library.

use thiserror::Error;

/// Errors surfaced by conelab operations.
#[derive(Debug, Error)]
pub enum ConelabError {
    /// Blade grades differ where equal grades are required.
    #[error("grade mismatch: {0} vs {1}")]
    GradeMismatch(usize, usize),

    /// Ambient dimensions differ where equal dimensions are required.
    #[error("ambient dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    /// Subspace dimensions differ where equal dimensions are required.
    #[error("subspace dimension mismatch: {0} vs {1}")]
    SubspaceDimMismatch(usize, usize),

    /// An operation was applied to an empty point set.
    #[error("empty point set")]
    EmptySet,

    /// A named generator is not in the catalog.
    #[error("unknown catalog entry: {0}")]
    UnknownCatalog(String),

    /// Scale ladder violates the resolution floor lambda_min >= c_floor * delta.
    #[error("scale ladder floor {lambda_min} below resolution bound {bound}")]
    ScaleFloor { lambda_min: f64, bound: f64 },

    /// Not enough data for the requested computation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A test point does not lie on the sampled set.
    #[error("test point at distance {dist} from the set (resolution {delta})")]
    PointNotOnSet { dist: f64, delta: f64 },

    /// A graph-tagged operation was invoked without a domain/codomain split.
    #[error("missing graph domain/codomain split")]
    MissingGraphSplit,

    /// Invalid configuration value.
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, ConelabError>;
