use alloc::string::String;

use crate::valuation::ValuationClass;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("a confusion matrix needs at least 2 classes, got {0}")]
    TooFewClasses(usize),
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("cell ({row}, {col}) must be finite and nonnegative, got {value}")]
    InvalidCell { row: usize, col: usize, value: f64 },
    #[error("matrix has zero total mass")]
    ZeroMass,
    #[error("not a permutation of 0..{0}")]
    InvalidPermutation(usize),
    #[error("matrix is degenerate: {rows} row class(es) and {cols} column class(es) carry positive mass, need at least 2 of each")]
    DegenerateMatrix { rows: usize, cols: usize },
    #[error("valuation is degenerate (weighted variance {0:e})")]
    DegenerateValuation(f64),
    #[error("valuation entry {0} is not finite")]
    NonFiniteValuation(usize),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("weight {index} must be finite and positive, got {value}")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("disagreement weight ({row}, {col}) must be finite and nonnegative, got {value}")]
    InvalidWeight { row: usize, col: usize, value: f64 },
    #[error("expected disagreement is zero, weighted kappa is undefined")]
    ZeroExpectedDisagreement,
    #[error("invalid options: {0}")]
    InvalidOptions(&'static str),
    #[error("draw limit reached after {draws} draws with {accepted} of {target} samples accepted (acceptance rate {rate:e})")]
    DrawLimit { accepted: u64, draws: u64, target: u64, rate: f64 },
    #[error("class {0} is not supported here")]
    UnsupportedClass(ValuationClass),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("singular value decomposition did not converge")]
    Svd,
}

impl Error {
    /// True for errors caused by a matrix or valuation without enough spread
    /// for a correlation to exist.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            Error::DegenerateMatrix { .. } | Error::DegenerateValuation(_) | Error::ZeroExpectedDisagreement
        )
    }
}
