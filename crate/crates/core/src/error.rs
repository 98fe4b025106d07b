use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown labels: {}", .0.join(", "))]
    UnknownLabels(Vec<String>),

    #[error("label `{0}` already present in dataset")]
    LabelCollision(String),

    #[error("histogram `{0}` has no elements (N = 0)")]
    EmptyHistogram(String),

    #[error("singular fit: {0}")]
    SingularFit(&'static str),

    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },

    #[error("no data in window [{lo}, {hi}]")]
    NoDataInWindow { lo: i64, hi: i64 },

    #[error("invalid window [{lo}, {hi}]: {reason}")]
    InvalidWindow { lo: i64, hi: i64, reason: &'static str },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "histogram `{label}`: renormalization denominator {denominator} at N = {n} \
         is not positive"
    )]
    NonPositiveDenominator {
        label: String,
        n: u64,
        denominator: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
