use thiserror::Error;

/// Errors raised by the model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An energy denominator of the second-order amplitude vanished.
    #[error("intermediate-state resonance: denominator {denominator_ev:e} eV (|d| < {tolerance_ev:e} eV)")]
    Resonance {
        denominator_ev: f64,
        tolerance_ev: f64,
    },

    /// A record violates one of its invariants.
    #[error("invalid {record}.{field}: {reason}")]
    Invalid {
        record: &'static str,
        field: &'static str,
        reason: String,
    },

    /// Successive quadrature refinements failed to agree.
    #[error(
        "quadrature did not converge: last relative change {relative_change:e} after {grid} panels"
    )]
    Convergence { relative_change: f64, grid: usize },

    /// A request would allocate beyond the configured limit.
    #[error("resource limit: {0}")]
    Resource(String),

    /// Too few samples for a meaningful statistical estimate.
    #[error("insufficient statistics: {have} events, need at least {need}")]
    InsufficientStatistics { have: usize, need: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(
    record: &'static str,
    field: &'static str,
    reason: impl Into<String>,
) -> Error {
    Error::Invalid {
        record,
        field,
        reason: reason.into(),
    }
}
