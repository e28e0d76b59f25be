//! Gröbner bases, Hilbert functions and dimensions of projective varieties.

mod groebner;
mod variety;

use thiserror::Error;

pub use groebner::{groebner, groebner_in, GroebnerBasis};
pub use variety::{projective_dim, ProjectiveDim, Variety};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("cannot infer the number of variables from an empty generator list")]
    NoVariables,
    #[error("generator lives in {found} variables, expected {expected}")]
    RingMismatch { expected: usize, found: usize },
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: u32, found: u32 },
}
