use thiserror::Error;

/// Errors produced by model construction, table building, and simulation.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Model parameters violate a constraint (nonpositive rate, weights not
    /// summing to one, ...).
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// An argument is outside the operation's domain (negative time,
    /// non-integrable exponent, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested quantity requires a finite mean the model does not have.
    #[error("infinite mean: {0}")]
    InfiniteMean(String),

    /// Two grid functions do not share step and extent.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Invalid configuration of a table or report builder.
    #[error("configuration error: {0}")]
    Config(String),

    /// The operation applies to a different tail regime than the model's.
    #[error("regime error: {0}")]
    Regime(String),

    /// The series truncation certificate cannot reach the requested
    /// tolerance within the term limit.
    #[error(
        "series truncation: tolerance {tol:e} needs {required} terms (limit {limit}); \
         the offered load is too high for the convolution series"
    )]
    SeriesTruncation { required: u64, limit: u64, tol: f64 },

    /// A simulated busy period exceeded the event budget.
    #[error(
        "runaway cycle: busy period exceeded {max_events} events \
         (lambda={lambda}, mean service={mean_service})"
    )]
    RunawayCycle {
        max_events: u64,
        lambda: f64,
        mean_service: f64,
    },

    /// A statistic was requested over an empty sample.
    #[error("empty sample set")]
    EmptySamples,
}

pub type Result<T> = std::result::Result<T, Error>;
