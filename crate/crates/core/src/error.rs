use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown variable `{0}` referenced by {1}")]
    UnknownVariable(String, String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("covariance matrix is not positive semidefinite (Cholesky failed)")]
    NotPositiveSemidefinite,

    #[error(
        "truncated-normal acceptance rate {rate:.3e} is below {floor:.0e}; \
         widen eps, shift the mean, or use a different sampler configuration"
    )]
    LowAcceptance { rate: f64, floor: f64 },

    #[error("preference weight {index} is nonpositive ({value}); scalarization requires beta > 0")]
    NonpositiveWeight { index: usize, value: f64 },

    #[error("objective `{0}` is unbounded over the feasible region")]
    UnboundedObjective(String),

    #[error("scalarized problem is {0}")]
    SolveFailed(crate::solver::SolverStatus),

    #[error(
        "{failed} of {requested} solves failed (budget is {budget_pct}%); first failures: {detail}"
    )]
    FailureBudgetExceeded {
        failed: usize,
        requested: usize,
        budget_pct: f64,
        detail: String,
    },

    #[error("sensitivity input is degenerate: {0}")]
    DegenerateInput(String),

    #[error("exact Shapley enumeration supports at most {max} variables, got {got}")]
    TooManyVariables { max: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
