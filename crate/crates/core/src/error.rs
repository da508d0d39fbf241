use thiserror::Error;

/// Errors raised by state construction, propagation and the numerical oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("j = {0} is not a positive half-integer")]
    InvalidSpin(f64),

    #[error("|lambda| must be finite, got {0}")]
    InvalidLambda(f64),

    #[error("mode index {0} out of range (two-mode states have modes 0 and 1)")]
    InvalidMode(usize),

    #[error("cutoff mismatch: {left:?} vs {right:?}")]
    CutoffMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("amplitude buffer of length {got} does not match cutoffs (expected {expected})")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("transmissivity {0} outside [0, 1]")]
    InvalidTransmissivity(f64),

    #[error("finite-difference step {0} outside [1e-8, 1e-2]")]
    StepOutOfRange(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
