use alloc::string::String;
use alloc::vec::Vec;

use crate::qmat::Violation;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max |A - A^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("invalid ensemble: {} violation(s)", .0.len())]
    InvalidEnsemble(Vec<Violation>),
    #[error("measurement {index} does not have equal-trace effects")]
    NotEqualTrace { index: usize },
    #[error("measurement {index} is not a rank-1 projective measurement")]
    NotProjective { index: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("numerical diagnostic: {0}")]
    Numerical(String),
}

impl Error {
    /// Numerical diagnostics are reported separately from validation failures by the CLI.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_))
    }
}
