use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Load { path: PathBuf, message: String },

    /// A panel failed validation; `row` and `column` locate the offending cell when known.
    #[error("invalid panel at row {row:?}, column {column:?}: {message}")]
    Panel {
        row: Option<usize>,
        column: Option<String>,
        message: String,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("matrix is singular or not positive definite: {0}")]
    Singular(String),

    #[error("covariance matrix is ill-conditioned (condition number {condition:.3e} > {limit:.0e}); consider a shrinkage or factor covariance estimator")]
    IllConditioned { condition: f64, limit: f64 },

    #[error("tangency portfolio is degenerate: 1'V^-1 mu = {0:.3e}")]
    DegenerateTangency(f64),

    #[error("no feasible portfolio has a positive expected return (best {0:.3e})")]
    NoPositiveReturn(f64),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("solver failed to converge after {iterations} iterations: {message}")]
    Convergence { iterations: usize, message: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}
