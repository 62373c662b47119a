use thiserror::Error;

use crate::classify::{ExistenceCondition, MatrixClass};
use crate::io::format_g17;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix must have even dimension, got {0}")]
    OddDimension(usize),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("eigensolver failed to converge (residual {residual:e})")]
    EigenNoConvergence { residual: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e} below -{threshold:e}")]
    NotPsd { eigenvalue: f64, threshold: f64 },

    #[error("matrix is not positive definite: eigenvalue {eigenvalue:e} not above {threshold:e}")]
    NotPositiveDefinite { eigenvalue: f64, threshold: f64 },

    #[error("matrix is not skew-symmetric (‖K + K^T‖_F = {residual:e})")]
    NotSkew { residual: f64 },

    #[error("columns do not form a symplectic frame (‖M^T J M - J‖_F = {defect:e})")]
    NotSymplectic { defect: f64 },

    #[error("basis columns are linearly dependent (singular value ratio {ratio:e})")]
    RankDeficient { ratio: f64 },

    #[error("subspace is not symplectic: {0}")]
    NotSymplecticSubspace(String),

    #[error("not a symplectic orthogonal projection: {0}")]
    NotProjection(String),

    /// A class-membership check failed. Carries the first violated condition.
    #[error(
        "{class} membership rejected: {condition} failed (condition {existence_condition}; residual {}, threshold {})",
        format_g17(*.residual),
        format_g17(*.threshold)
    )]
    Rejected {
        class: MatrixClass,
        condition: String,
        existence_condition: ExistenceCondition,
        residual: f64,
        threshold: f64,
    },

    #[error(
        "numerical failure in {stage}: residual {} exceeds {}",
        format_g17(*.residual),
        format_g17(*.threshold)
    )]
    Numerical {
        stage: &'static str,
        residual: f64,
        threshold: f64,
    },

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse grouping used for process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorCategory {
    /// The input is well formed but outside the class the operation needs.
    Rejection,
    /// Malformed input, I/O failure or invalid arguments.
    Input,
    /// An algorithm ran but its residuals did not meet the contract.
    Numerical,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Rejected { .. }
            | Error::NotPsd { .. }
            | Error::NotPositiveDefinite { .. }
            | Error::NotSkew { .. }
            | Error::NotSymplectic { .. }
            | Error::NotSymplecticSubspace(_)
            | Error::NotProjection(_) => ErrorCategory::Rejection,
            Error::EigenNoConvergence { .. } | Error::Numerical { .. } => ErrorCategory::Numerical,
            Error::Dimension(_)
            | Error::OddDimension(_)
            | Error::NotSquare { .. }
            | Error::NonFinite { .. }
            | Error::RankDeficient { .. }
            | Error::InvalidSpec(_)
            | Error::Parse { .. }
            | Error::Io(_) => ErrorCategory::Input,
        }
    }
}
