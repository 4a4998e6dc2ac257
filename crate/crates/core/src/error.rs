use thiserror::Error;

/// Errors produced anywhere in the library.
///
/// Variants are coarse on purpose: callers (most notably the CLI) map them
/// onto exit codes, so each variant corresponds to one class of failure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A search over a finite range came up empty.
    #[error("not found: {0}")]
    NotFound(String),

    /// The operation is undefined for this input (zero divisor, zero polynomial, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The field is too small for the requested construction.
    #[error("unsupported field: {reason} (minimum viable p = {min_p})")]
    UnsupportedField { reason: String, min_p: u64 },

    /// A hypothesis of the construction or algorithm is violated.
    #[error("unsupported parameters: {0}")]
    UnsupportedParameters(String),

    /// Evaluations or equations that should agree do not.
    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    /// No decoding index survived the erasures.
    #[error("decode failure: {0}")]
    DecodeFailure(String),

    /// The input is not a sum of few powers in the promised class.
    #[error("not in class: {0}")]
    NotInClass(String),

    /// Per-direction outputs could not be matched up by their labels.
    #[error("alignment error: {0}")]
    Alignment(String),

    /// The multivariate driver found no usable anchor point.
    #[error("reconstruction failure: {0}")]
    Reconstruction(String),

    /// An internal bound that holds for in-class inputs was exceeded.
    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),

    /// Vectors or points of the wrong length.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Black-box evaluation failed.
    #[error("oracle error: {0}")]
    Oracle(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
