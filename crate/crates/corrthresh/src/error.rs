//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by correlation, graph, estimation and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A data column has zero sample variance, so its correlations are undefined.
    #[error("column {0} has zero variance; correlations are undefined")]
    ZeroVarianceColumn(usize),

    /// Input dimensions are inconsistent or too small for the operation.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// Two structures or matrices that must share a variable count do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// No candidate thresholds can be formed (fewer than two variables).
    #[error("cannot build a threshold grid for fewer than two variables")]
    EmptyGrid,

    /// A matrix required to be positive definite failed its factorization.
    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    /// Fit indices are undefined (baseline or model degrees of freedom degenerate).
    #[error("fit indices undefined: {0}")]
    DegenerateBaseline(String),

    /// Every threshold produced an empty or all-singleton structure and
    /// null-model fitting is disabled.
    #[error("no candidate structures: every threshold yields an empty or all-singleton graph")]
    NoCandidates,

    /// The simulation scheme cannot be realized for the given configuration.
    #[error("infeasible simulation scheme: {0}")]
    InfeasibleScheme(String),

    /// A scalar argument is outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Malformed CSV or JSON input.
    #[error("input error: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Input(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
