use thiserror::Error;

use crate::cooling::CoolingKind;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{n} qubits exceeds the dense realization limit of {max}")]
    DimensionOverflow { n: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{kind} is not a realizable cooling function: its dual has infinite one-norm")]
    NonRealizable { kind: CoolingKind },

    #[error("observable has no terms or zero one-norm")]
    EmptyObservable,

    #[error("matrix is not Hermitian: largest entry asymmetry {0:e}")]
    NonHermitian(f64),

    #[error("cooled state norm {0:e} is below the 1e-14 floor")]
    VanishingNorm(f64),

    #[error("overlap magnitude {0} exceeds 1; engine inconsistency")]
    OverlapOutOfRange(f64),

    #[error(
        "normalization estimate {value:e} is below the floor {floor:e}; increase shots or overlap"
    )]
    DegenerateRatio { value: f64, floor: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
