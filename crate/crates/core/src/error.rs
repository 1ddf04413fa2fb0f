use thiserror::Error;

/// Errors raised by map construction, classification and density computations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{constraint} violated ({detail})")]
    ConstraintViolation {
        constraint: &'static str,
        detail: String,
    },

    #[error("x = c requires an explicit left or right side")]
    AmbiguousCritical,

    #[error("map is not a homeomorphism: f(0) = {f0} differs from f(1) = {f1}")]
    NotHomeomorphism { f0: f64, f1: f64 },

    #[error("orbit landed on the critical point at step {index}")]
    CriticalHit { index: usize },

    #[error("log a / log b is undefined or trivial for slope 1")]
    DegenerateSlope,

    #[error("rationality of log a / log b cannot be certified for floating-point input")]
    IndeterminateRationality,

    #[error(
        "ac + b(1-c) = {boundary_sum} is within tolerance of 1; rerun with exact rational input"
    )]
    BoundaryAmbiguous { boundary_sum: f64 },

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("expected a unique periodic orbit of period {kappa}, found {count}")]
    UniquenessViolated { kappa: usize, count: usize },

    #[error("no periodic orbit of period {kappa} found")]
    NoneFound { kappa: usize },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("map with minimal period {kappa} is not renormalizable")]
    NotRenormalizable { kappa: usize },

    #[error("step density needs {count} breakpoints, budget is {budget}")]
    BreakpointBudgetExceeded { count: usize, budget: usize },

    #[error("no convergence after {iterations} iterations (last L1 change {last_change:e})")]
    NoConvergence { iterations: usize, last_change: f64 },

    #[error("both endpoints are fixed; the endpoint-orbit series vanishes identically")]
    DegenerateEndpoints,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("renormalized map has unequal slopes {left} and {right}")]
    AsymmetricRenormalization { left: f64, right: f64 },

    #[error("invalid step density: {0}")]
    InvalidDensity(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable variant name, used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::ConstraintViolation { .. } => "ConstraintViolation",
            Error::AmbiguousCritical => "AmbiguousCritical",
            Error::NotHomeomorphism { .. } => "NotHomeomorphism",
            Error::CriticalHit { .. } => "CriticalHit",
            Error::DegenerateSlope => "DegenerateSlope",
            Error::IndeterminateRationality => "IndeterminateRationality",
            Error::BoundaryAmbiguous { .. } => "BoundaryAmbiguous",
            Error::VerificationFailed(_) => "VerificationFailed",
            Error::PreconditionViolation(_) => "PreconditionViolation",
            Error::UniquenessViolated { .. } => "UniquenessViolated",
            Error::NoneFound { .. } => "NoneFound",
            Error::NotApplicable(_) => "NotApplicable",
            Error::NotRenormalizable { .. } => "NotRenormalizable",
            Error::BreakpointBudgetExceeded { .. } => "BreakpointBudgetExceeded",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::DegenerateEndpoints => "DegenerateEndpoints",
            Error::InvalidParams(_) => "InvalidParams",
            Error::AsymmetricRenormalization { .. } => "AsymmetricRenormalization",
            Error::InvalidDensity(_) => "InvalidDensity",
            Error::Parse(_) => "Parse",
            Error::Io(_) => "Io",
            Error::Csv(_) => "Csv",
            Error::Json(_) => "Json",
        }
    }

    /// Errors caused by malformed or out-of-range input rather than by an
    /// operation's precondition.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::ConstraintViolation { .. } | Error::Parse(_) | Error::AmbiguousCritical
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
