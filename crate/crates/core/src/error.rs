use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid category scheme: {0}")]
    InvalidScheme(String),

    #[error("invalid AQI value {value} at row {row}")]
    InvalidAqi { row: usize, value: f64 },

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("malformed input on line(s) {lines:?}: {message}")]
    Malformed { lines: Vec<usize>, message: String },

    #[error("lag {lag} is not smaller than series length {len}")]
    LagTooLarge { lag: usize, len: usize },

    #[error("invalid covariate spec: {0}")]
    InvalidSpec(String),

    #[error("no festival date configured for year {0}")]
    MissingFestival(i32),

    #[error("date {0} is outside the configured calendar")]
    OutOfCalendar(String),

    #[error("design has no usable rows: {0}")]
    EmptyDesign(String),

    #[error("thresholds must be strictly increasing: {0:?}")]
    NonIncreasingThresholds(Vec<f64>),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("rank-deficient design; collinear columns: {0:?}")]
    RankDeficient(Vec<String>),

    #[error("need at least two distinct response categories, found {0}")]
    TooFewCategories(usize),

    #[error("insufficient history: {0}")]
    InsufficientHistory(String),

    #[error("measure undefined: {0}")]
    Undefined(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
