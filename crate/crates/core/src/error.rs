use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: String,
        found: String,
    },

    #[error("{op}: matrix is singular or numerically singular ({detail})")]
    Singular { op: &'static str, detail: String },

    #[error("{op}: matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { op: &'static str, residual: f64 },

    #[error("{op}: matrix is not symmetric (residual {residual:.3e})")]
    NotSymmetric { op: &'static str, residual: f64 },

    #[error("{op}: Hermitian part is not positive definite (minimum eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite {
        op: &'static str,
        min_eigenvalue: f64,
    },

    #[error("eigenvalue iteration failed to converge in {op}")]
    NoConvergence { op: &'static str },

    #[error("quadrature grid of {points} points exceeds the budget of {budget}")]
    BudgetExceeded { points: f64, budget: f64 },

    #[error("series expansion needs {needed} coefficients, budget is {budget}")]
    ExpansionBudget { needed: usize, budget: usize },

    /// A mathematical hypothesis of a closed-form identity is violated,
    /// e.g. `det(k + I) = 0`.
    #[error("precondition `{identity}` violated: |value| = {value:.3e} <= {epsilon:.3e}")]
    Precondition {
        identity: &'static str,
        value: f64,
        epsilon: f64,
    },

    /// Two routes to the same quantity disagree beyond tolerance.
    #[error("{what}: independent evaluations disagree (residual {residual:.3e} > {tolerance:.3e})")]
    Inconsistent {
        what: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err(op: &'static str, expected: impl ToString, found: impl ToString) -> Error {
    Error::DimensionMismatch {
        op,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
