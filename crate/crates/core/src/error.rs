use thiserror::Error;

use crate::loss::LossKind;

/// Errors raised by kernel assembly, regularizer construction, objective
/// evaluation and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("points {first} and {second}: {reason}")]
    PointPair {
        first: usize,
        second: usize,
        reason: String,
    },

    #[error("points {first} and {second} coincide")]
    DuplicatePoints { first: usize, second: usize },

    #[error("matrix is not symmetric (max deviation {deviation:e})")]
    Asymmetric { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:e}, max {max_eig:e})")]
    NotPsd { min_eig: f64, max_eig: f64 },

    #[error("vertex {0} has zero degree")]
    IsolatedVertex(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{kind} loss is not differentiable at y={y:?}, z={z:?}")]
    NotDifferentiable {
        kind: LossKind,
        y: Vec<f64>,
        z: Vec<f64>,
    },

    #[error("operation not supported for {kind} loss: {what}")]
    UnsupportedLoss { kind: LossKind, what: String },

    #[error("linear system is numerically singular (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("Gram matrix is numerically singular (least eigenvalue {lambda_min:e})")]
    DegenerateGram { lambda_min: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
