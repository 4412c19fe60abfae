//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong between input parsing and certificate output.
#[derive(Debug, Error)]
pub enum Error {
    /// A point, coefficient list, or matrix does not match the declared
    /// number of variables.
    #[error("dimension mismatch: expected {expected} variables, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Two operands carry incompatible homogeneity degrees.
    #[error("degree mismatch: {context}")]
    DegreeMismatch { context: String },

    /// A coefficient matrix fails the Hermitian-symmetry requirement.
    #[error("matrix is not Hermitian at entry ({row},{col})")]
    NotHermitian { row: usize, col: usize },

    /// Component lists for a squared norm must share one variable count and
    /// one degree.
    #[error("mixed component shapes: {context}")]
    MixedComponents { context: String },

    /// The zero polynomial is legal for algebra but carries no positivity
    /// content; certificate searches reject it.
    #[error("the zero polynomial admits no certificate search")]
    ZeroPolynomial,

    /// A strict (positive-definite) factorization was requested but a zero
    /// pivot appeared.
    #[error("strictness violation: zero pivot at step {step} (rank {rank} of {size})")]
    StrictnessViolation {
        step: usize,
        rank: usize,
        size: usize,
    },

    /// The multiplier-degree search hit its cap without a certificate.
    #[error("no certificate up to multiplier degree {cap}")]
    CapExceeded { cap: usize },

    /// A negative value of the input on the unit sphere disproves the
    /// positivity hypothesis; the point is reported in float coordinates.
    #[error("input is negative on the unit sphere: value {value:.6e} at {point:?}")]
    HypothesisViolated { point: Vec<(f64, f64)>, value: f64 },

    /// The domain cannot supply a Gram matrix at the requested degree.
    #[error("no Gram matrix for degree {degree} on {domain}: {reason}")]
    GramUnavailable {
        domain: String,
        degree: usize,
        reason: String,
    },

    /// Closed-form Gram entries stop at the domain's degree cap.
    #[error("degree {degree} exceeds the cap {cap} for {context}")]
    DegreeOverflow {
        degree: usize,
        cap: usize,
        context: String,
    },

    /// A sampled domain holds fewer points than the basis it must integrate.
    #[error("sampled domain has {got} points but degree {degree} needs at least {needed}")]
    InsufficientSamples {
        got: usize,
        needed: usize,
        degree: usize,
    },

    /// Rejection sampling accepted no points; the bounding box or the
    /// membership test is misconfigured.
    #[error("rejection sampler accepted 0 of {drawn} points")]
    ZeroAcceptance { drawn: usize },

    /// Monte-Carlo data cannot enter the exact tower; conversions between
    /// scalar towers are explicit.
    #[error("operation requires the float tower: {context}")]
    TowerMismatch { context: String },

    /// Exact inversion of a singular matrix.
    #[error("matrix is singular")]
    SingularMatrix,

    /// A malformed input file; the message names the offending field.
    #[error("invalid {kind}: {message}")]
    InvalidInput { kind: &'static str, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Shorthand for input-validation failures.
    pub fn invalid(kind: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidInput {
            kind,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
