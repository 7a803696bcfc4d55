use thiserror::Error;

use crate::symbol::{EvalError, ParseError};

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("signals live on different grids")]
    GridMismatch,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("flow diverged at node {node} (t = {t})")]
    Divergence { node: usize, t: f64 },

    #[error("operation requires a purely quadratic Hamiltonian")]
    NotQuadratic,

    #[error("Hamiltonian is not separable: {0}")]
    NotSeparable(String),

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("frame operator is not invertible (lower bound {0:e})")]
    NotAFrame(f64),

    #[error("symbol produced a non-finite or complex value: {0}")]
    BadSymbol(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
