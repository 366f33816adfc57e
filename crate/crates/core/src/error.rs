use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("basis vectors are linearly dependent")]
    DegenerateBasis,
    #[error("comparison undecided at the maximum precision of {bits} bits")]
    PrecisionExhausted { bits: u32 },
    #[error("the zero vector has no primitivity")]
    ZeroVector,
    #[error("surface of genus {genus} with {boundary} boundary components has nonnegative Euler characteristic")]
    InvalidTopology { genus: i64, boundary: i64 },
    #[error("area must be positive")]
    NonpositiveArea,
    #[error("boundary curve has zero fiber intersection (u = 0)")]
    ZeroU,
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("integer overflow in basis transform")]
    Overflow,
}
