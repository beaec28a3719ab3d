use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix or state dimensions do not line up for the requested operation.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A value failed a constructor or operation precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A matrix that must be Hermitian is not, within tolerance.
    #[error("matrix is not Hermitian: entry ({row},{col}) vs ({col},{row}) differ by {violation:.3e}")]
    NotHermitian {
        row: usize,
        col: usize,
        violation: f64,
    },

    /// A projection carried no weight; there is nothing to analyze.
    #[error("degenerate projection: weight {weight:.3e} below cutoff {cutoff:.3e}")]
    DegenerateProjection { weight: f64, cutoff: f64 },

    /// The requested sweep exceeds the configured projection budget.
    #[error("sweep of {required} projections exceeds budget {budget}; raise the budget explicitly to proceed")]
    BudgetExceeded { required: u64, budget: u64 },

    /// An iterative routine failed to converge within its iteration cap.
    #[error("{routine} did not converge: {detail}")]
    NonConvergence { routine: &'static str, detail: String },

    /// A state document or state spec string could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
