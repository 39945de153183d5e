use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scenario or argument violates a model invariant.
    #[error("validation error at {location}: {message}")]
    Validation { location: String, message: String },

    /// Scenario file could not be read or decoded.
    #[error("parse error: {0}")]
    Parse(String),

    /// The best-response system is not strictly diagonally dominant.
    #[error("dominance violation in row {row} (margin {margin:e})")]
    DominanceViolation { row: usize, margin: f64 },

    #[error("singular denominator for group {group}")]
    SingularDenominator { group: usize },

    #[error("pressure profile did not converge after {rounds} rounds (last change {residual:e}, profile {last:?})")]
    NonConvergence {
        rounds: usize,
        residual: f64,
        last: Vec<f64>,
    },

    #[error("group {group} is not at an interior efficient level")]
    NotInterior { group: usize },

    #[error("perturbation crosses a regime boundary ({before} -> {after})")]
    RegimeChange { before: String, after: String },

    #[error("reference peer statistic coincides with the belief (|E - belief| <= 1e-12)")]
    DegenerateReference,

    #[error("parameters sit on a regime threshold for group {group}: {detail}")]
    AmbiguousBoundary { group: usize, detail: String },

    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    #[error("operation requires a quadratic payoff")]
    RequiresQuadratic,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn validation(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            location: location.into(),
            message: message.into(),
        }
    }

    /// Process exit code used at the CLI boundary.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation { .. }
            | Error::Parse(_)
            | Error::InvalidArgument(_)
            | Error::RequiresQuadratic => 2,
            _ => 3,
        }
    }

    /// Short label written into table cells when a grid point fails.
    pub fn label(&self) -> &'static str {
        match self {
            Error::Validation { .. } => "ValidationError",
            Error::Parse(_) => "ParseError",
            Error::DominanceViolation { .. } => "DominanceViolation",
            Error::SingularDenominator { .. } => "SingularDenominator",
            Error::NonConvergence { .. } => "NonConvergence",
            Error::NotInterior { .. } => "NotInterior",
            Error::RegimeChange { .. } => "RegimeChange",
            Error::DegenerateReference => "DegenerateReference",
            Error::AmbiguousBoundary { .. } => "AmbiguousBoundary",
            Error::RegimeMismatch(_) => "RegimeMismatch",
            Error::RequiresQuadratic => "RequiresQuadratic",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}
