use thiserror::Error;

/// A vector or matrix had the wrong length or dimension.
#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
#[error("dimension mismatch: expected {expected}, found {found}")]
pub struct DimensionMismatch {
    pub expected: usize,
    pub found: usize,
}

impl DimensionMismatch {
    pub fn check(expected: usize, found: usize) -> Result<(), Self> {
        if expected == found {
            Ok(())
        } else {
            Err(Self { expected, found })
        }
    }
}
