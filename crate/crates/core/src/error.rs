//! Error types shared across the library.

use crate::charts::ChartId;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QbhError {
    /// A point violated a chart invariant or left the guarded domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An operation mixed objects living on different charts.
    #[error("chart mismatch: expected {expected:?}, got {got:?}")]
    ChartMismatch { expected: ChartId, got: ChartId },

    /// A point sits on a degenerate locus where the requested structure collapses.
    #[error("degenerate locus: {0}")]
    DegenerateLocus(String),

    /// The implicit solver exhausted its iteration budget.
    #[error("no convergence after {iterations} iterations (step {step_index})")]
    NoConvergence {
        iterations: usize,
        step_index: usize,
    },

    /// An unregistered check id was requested.
    #[error("unknown check: {0}")]
    UnknownCheck(String),

    /// An unknown suite name was requested.
    #[error("unknown suite: {0}")]
    UnknownSuite(String),

    /// Rejection sampling failed to find admissible points.
    #[error("sample domain exhausted for check {0} (rejection rate > 99%)")]
    DomainExhausted(String),
}

pub type Result<T> = std::result::Result<T, QbhError>;
