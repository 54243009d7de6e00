use thiserror::Error;

/// Errors raised by the WIPT numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    /// A structurally invalid input (bad grid, overlapping sets, ...).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// The requested energy rate cannot be met by any input distribution.
    #[error("infeasible energy rate {b}: maximum achievable is {max}")]
    InfeasibleEnergy { b: f64, max: f64 },

    /// The operation does not support the given model or configuration.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An iterative solver hit its iteration cap.
    #[error("{solver} did not converge after {iterations} iterations (residuals {residuals:?})")]
    Convergence {
        solver: &'static str,
        iterations: usize,
        residuals: Vec<f64>,
    },
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64) -> Self {
        Error::Domain { what, value }
    }

    /// True for solver failures, as opposed to bad input.
    pub fn is_convergence(&self) -> bool {
        matches!(self, Error::Convergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
