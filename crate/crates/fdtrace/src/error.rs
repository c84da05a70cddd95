use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("elements belong to different algebras")]
    ParentMismatch,
    #[error("element is not Hermitian within tolerance")]
    NotHermitian,
    #[error("element is not positive within tolerance")]
    NotPositive,
    #[error("element is not a projection within tolerance")]
    NotProjection,
    #[error("functional is not self-adjoint within tolerance")]
    NotSelfAdjoint,
    #[error("element lies outside the right ideal (residual {0:.3e})")]
    OutsideIdeal(f64),
    #[error("element is not in the closed ideal generated by the given set (block {0})")]
    IdealMembership(usize),
    #[error("measure is not invariant: units {0} and {1} in one orbit carry different weights")]
    NotInvariant(String, String),
    #[error("groupoid is invalid: {0}")]
    InvalidGroupoid(String),
    #[error("json error: {0}")]
    Json(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
