use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("degree {0} out of range (must be 2..=36)")]
    InvalidDegree(usize),

    #[error("letter {letter} is not in the alphabet of degree {degree}")]
    AlphabetMismatch { letter: usize, degree: usize },

    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("permutation {0:?} is not a bijection")]
    NotABijection(Vec<usize>),

    #[error("unknown generator(s): {}", .0.join(", "))]
    UnknownGenerator(Vec<String>),

    #[error("invalid group specification: {0}")]
    InvalidSpec(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("family parameters rejected: {0}")]
    InvalidFamily(String),

    #[error("resource cap exceeded: {0}")]
    CapExceeded(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}
