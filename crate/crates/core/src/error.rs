use thiserror::Error;

use crate::scalar::Epsilon;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("composition class mismatch: u² = {left} vs u² = {right}")]
    ClassMismatch { left: Epsilon, right: Epsilon },

    #[error("{0} is not invertible (zero modulus)")]
    NotInvertible(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("cannot combine a {left} element with a {right} element")]
    KindMismatch {
        left: &'static str,
        right: &'static str,
    },

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("a numeric hbar is required here, got the formal symbol")]
    FormalHbar,

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },

    #[error("insufficient rank: {0}")]
    InsufficientRank(String),

    #[error("no solution: {witness}")]
    NoSolution { witness: String },

    #[error("coproduct table entry {0} is unknown")]
    UnknownTableEntry(&'static str),
}
