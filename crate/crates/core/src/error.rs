use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension {0} exceeds the supported maximum of {max}", max = crate::tol::MAX_DIM)]
    Size(usize),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not Hermitian (max |m - m†| = {0:e})")]
    NotHermitian(f64),

    #[error("matrix is rank deficient; draw a new sample")]
    RankDeficient,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
