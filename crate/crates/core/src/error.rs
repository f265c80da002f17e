use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("denominator is not strictly positive at x = {state}")]
    NonPositiveDenominator { state: u64 },

    #[error("denominator has a non-positive leading coefficient")]
    DenominatorLeadingSign,

    #[error("denominator polynomial is identically zero")]
    ZeroDenominator,

    #[error("rate for jump {eta} is negative at state {state}")]
    NegativeRate { eta: i64, state: u64 },

    #[error("jump {eta} has an identically zero rate and the probe graph is disconnected")]
    VanishingRate { eta: i64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("every transition rate is identically zero")]
    AllRatesZero,

    #[error("leading variance coefficient must be positive, got {0}")]
    NonPositiveTheta(String),

    #[error("variance vanishes at x = {state}")]
    ZeroVariance { state: u64 },

    #[error("not a unit birth-death model: {0}")]
    NotBirthDeath(String),

    #[error("truncation level {0} is too small")]
    TruncationTooSmall(u64),

    #[error("balance system is singular (pivot {pivot:e} at row {row})")]
    SingularSystem { row: usize, pivot: f64 },

    #[error("balance residual {residual:e} exceeds tolerance {tolerance:e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },

    #[error("distribution has only {found} usable support points, need {needed}")]
    DegenerateSupport { found: usize, needed: usize },

    #[error("no trajectory defines a state at t = {0}")]
    NoUsableRuns(f64),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("unsupported reduction: {0}")]
    UnsupportedReduction(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
