use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A model input fell outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("calibration failed: marginal cost {c} is not below the price {price} at hour {hour:02}:00")]
    Calibration { hour: usize, price: f64, c: f64 },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("{malformed} of {total} rows malformed (limit {limit_pct}%), first at line {first_line}")]
    TooManyMalformed {
        malformed: usize,
        total: usize,
        limit_pct: f64,
        first_line: u64,
    },

    #[error("no coverage for hour {hour:02}:00")]
    MissingCoverage { hour: usize },

    #[error("brute-force enumeration refused for n = {n} (limit {limit})")]
    TooLarge { n: usize, limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
