use thiserror::Error;

use crate::spectrum_match::MatchSolution;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("matrix is not Hermitian at ({row}, {col})")]
    NotHermitian { row: usize, col: usize },

    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite {0}")]
    NonFinite(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("perturbed sensor positions are no longer strictly increasing (index {index})")]
    GeometryCollision { index: usize },

    #[error("spectrum denominator {value:e} is numerically zero")]
    DegenerateSpectrum { value: f64 },

    #[error("angular grid is empty")]
    EmptyGrid,

    #[error("power iterate vanished after {iteration} iterations")]
    ZeroIterate { iteration: usize },

    #[error("spectrum matching is infeasible within the iteration budget")]
    Infeasible { best: Box<MatchSolution> },

    #[error("spectrum matching did not converge in {} iterations", best.iterations)]
    SolverNoConvergence { best: Box<MatchSolution> },

    #[error("desired-signal covariance has no positive dominant eigenvalue ({lambda:e})")]
    DegenerateSignal { lambda: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
