use thiserror::Error;

/// Errors reported by the library.
///
/// Every variant corresponds to a contract violation at an operation
/// boundary; internal invariant breaches panic instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An instance failed its structural invariants.
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// A voter or candidate index is out of range.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// Vector sizes do not match the instance dimensions.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A fractional committee violates its invariants.
    #[error("invalid committee: {0}")]
    InvalidCommittee(String),

    /// A lottery violates its invariants.
    #[error("invalid lottery: {0}")]
    InvalidLottery(String),

    /// Generator or builder parameters are outside their domain.
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// A warm-start flow violates capacity or conservation constraints.
    #[error("infeasible warm start: {0}")]
    InfeasibleWarmStart(String),

    /// An exponential oracle was asked to enumerate beyond its size bound.
    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),

    /// A min-cost flow was requested on a network without costs.
    #[error("missing costs: {0}")]
    MissingCosts(String),

    /// A payment function fails the affordability conditions.
    #[error("unaffordable payments: {0}")]
    UnaffordablePayments(String),
}
