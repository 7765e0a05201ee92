use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    InvalidParameter(String),

    #[error("invalid offspring law: {0}")]
    InvalidLaw(String),

    #[error("no critical exponential tilt exists: {0}")]
    NoCriticalTilt(String),

    #[error("cannot calibrate B_n: law has neither finite variance nor a tail constant")]
    UnknownTail,

    #[error("invalid coding: {0}")]
    InvalidCoding(String),

    #[error("increments sum to {0}, expected -1")]
    BadIncrementSum(i64),

    #[error("P[zeta = {n}] = 0 under this offspring law")]
    ZeroConditionalProbability { n: usize },

    #[error("exact table for n = {n} needs {entries} entries, above the budget of {budget}")]
    TableTooLarge { n: usize, entries: usize, budget: usize },

    #[error("truncation budget exceeded: excluded mass {excluded:e} > budget {budget:e}")]
    TruncationBudget { excluded: f64, budget: f64 },

    #[error("value {k} lies above the table window (last exact value {last})")]
    OutsideWindow { k: i64, last: i64 },

    #[error("{what} cross-check failed at n = {n}: discrepancy {gap:e} > {tolerance:e}")]
    CrossCheck { what: &'static str, n: usize, gap: f64, tolerance: f64 },

    #[error("n = {n} too large for exhaustive enumeration (max {max})")]
    EnumerationTooLarge { n: usize, max: usize },

    #[error("quadrature did not converge: error estimate {estimate:e} > tolerance {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("{what} = {value} outside the supported domain [{lo}, {hi}]")]
    OutOfDomain { what: &'static str, value: f64, lo: f64, hi: f64 },

    #[error("zero denominator: {0}")]
    Unreachable(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
