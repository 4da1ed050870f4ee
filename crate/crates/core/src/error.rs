use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid e-value pair ({e1}, {e2}): both components must be finite and nonnegative")]
    InvalidPair { e1: f64, e2: f64 },

    #[error("bet {0} is outside [0, 1]")]
    InvalidBet(f64),

    #[error("observation {value} is outside [0, 1]")]
    ObservationOutOfRange { value: f64 },

    #[error("gamma {gamma} is outside the admissible interval [{lo}, {hi}]")]
    GammaOutOfRange { gamma: f64, lo: f64, hi: f64 },

    #[error("null mean {0} must lie strictly inside (0, 1)")]
    InvalidNullMean(f64),

    #[error("ledger was created without pair history; best-in-hindsight quantities are unavailable")]
    HistoryNotRetained,

    #[error("degenerate distribution: expected log-increment is -inf for every bet in (0, 1)")]
    DegenerateDistribution,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("null-side alternative: no finite bound (growth rate {0} <= 0)")]
    NonPositiveGrowth(f64),

    #[error("alpha {0} must lie strictly inside (0, 1)")]
    InvalidAlpha(f64),

    #[error("|delta| = {delta} violates the required regime: {reason}")]
    InvalidDelta { delta: f64, reason: String },

    #[error("unknown strategy `{0}` (expected up, ons, ftl, co96, oj23, oracle or const:<lambda>)")]
    UnknownStrategy(String),

    #[error("unknown problem `{0}` (expected bounded2:<mu0>, bounded1:<mu0> or diffmeans)")]
    UnknownProblem(String),

    #[error("invalid source distribution: {0}")]
    InvalidSource(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
