use thiserror::Error;

/// Errors raised by validation, construction and the consistency checkers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("not Hermitian (max |M - M^dag| = {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("not idempotent (max |M^2 - M| = {residual:.3e})")]
    NotIdempotent { residual: f64 },

    #[error("not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace is not 1 (got {trace})")]
    TraceNotOne { trace: f64 },

    #[error("events {0} and {1} of the resolution are not orthogonal (residual {2:.3e})")]
    NotOrthogonal(usize, usize, f64),

    #[error("events do not sum to the identity (residual {residual:.3e})")]
    NotComplete { residual: f64 },

    #[error("histories are not summable")]
    NotSummable,

    #[error("family has {members} coarse-grained members, above the cap of {cap}")]
    FamilyTooLarge { members: usize, cap: usize },

    #[error("history is not commutative (max commutator {residual:.3e})")]
    NotCommutative { residual: f64 },

    #[error("operators do not commute (max commutator {residual:.3e})")]
    NotCommuting { residual: f64 },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("conditioning event has zero probability ({probability:.3e})")]
    ConditionHasZeroProbability { probability: f64 },

    #[error("conditioning event has zero probability ({probability:.3e})")]
    ZeroConditioningEvent { probability: f64 },

    #[error("expected a {expected}-event history, got {actual} events")]
    WrongHistoryLength { expected: usize, actual: usize },

    #[error("projection is not a verified mirror for this history and state")]
    MirrorNotVerified,

    #[error("occurrence probability expressions disagree: {0:.3e} / {1:.3e} / {2:.3e}")]
    IdentityChainMismatch(f64, f64, f64),

    #[error("mixing weight {0} outside the open interval (0, 1)")]
    LambdaOutOfRange(f64),

    #[error("bad parameters: {0}")]
    BadParameters(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid {name}: {cause}")]
    Invalid { name: String, cause: Box<Error> },

    #[error("empty input: {0}")]
    Empty(&'static str),
}

impl Error {
    pub(crate) fn named(name: impl Into<String>, cause: Error) -> Self {
        Error::Invalid {
            name: name.into(),
            cause: Box::new(cause),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
