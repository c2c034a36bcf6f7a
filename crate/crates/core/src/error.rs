use thiserror::Error;

use crate::solver::SolveReport;

/// Errors raised by the kernel, the oracles and the solver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A value lies outside the domain of the requested function
    /// (e.g. the square root of a genuinely indefinite matrix).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Double precision cannot deliver the accuracy the error budget asks for.
    #[error("precision error: {0}")]
    Precision(String),

    /// The iteration budget ran out before the certified gap closed. The
    /// best point found so far is carried along.
    #[error("iteration budget of {budget} exhausted with certified gap {gap:.3e}", gap = .report.certified_gap)]
    BudgetExceeded {
        budget: usize,
        report: Box<SolveReport>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
