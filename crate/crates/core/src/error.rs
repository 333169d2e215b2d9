use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("{0}")]
    Domain(String),

    /// Adaptive refinement or root bracketing gave up.
    #[error("no convergence: {0}")]
    NonConvergence(String),

    /// An exhaustive search would exceed the configured budget.
    /// `required` is the work the search would do; `search_space` the number
    /// of candidates it covers.
    #[error("search space of {search_space} candidates needs {required} evaluations, over the budget of {budget}")]
    BudgetExceeded { required: u128, search_space: u128, budget: u128 },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("operation needs a non-empty set")]
    EmptySet,

    /// An index or count is out of range.
    #[error("{0}")]
    Range(String),

    /// Malformed configuration or input text.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

/// Checks `0 < eps < 1/2`, the range every bound is stated for.
pub(crate) fn check_half_open_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 0.5 {
        Ok(())
    } else {
        Err(domain("eps must lie in (0, 0.5)"))
    }
}
