use thiserror::Error;

/// Errors produced by the discrimination library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0}")]
    MalformedInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state {index} is not normalized (norm = {norm})")]
    NotNormalized { index: usize, norm: f64 },

    #[error("ensemble needs at least one state")]
    EmptyEnsemble,

    #[error("expected {expected} states for a {expected}-dimensional space, found {found}")]
    NotSquare { expected: usize, found: usize },

    #[error("invalid priors: {0}")]
    InvalidPriors(String),

    #[error("invalid values: {0}")]
    InvalidValues(String),

    #[error("states are linearly dependent (gram volume {gram_volume:e} below {tolerance:e})")]
    LinearDependence { gram_volume: f64, tolerance: f64 },

    #[error("coefficient k[{index}] = {value} is negative")]
    NegativeCoefficient { index: usize, value: f64 },

    #[error(
        "inconclusive operator is not positive semidefinite (min eigenvalue {min_eigenvalue:e})"
    )]
    Infeasible { min_eigenvalue: f64 },

    #[error("unsupported dimension {found}: {reason}")]
    UnsupportedDimension { found: usize, reason: &'static str },

    #[error("outcome probability {value:e} for input {input} is negative beyond round-off")]
    NegativeProbability { input: usize, value: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
