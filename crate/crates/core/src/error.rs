use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HtiError {
    #[error(
        "invalid hypergeometric parameters: need 0 <= k <= m <= M and K <= M, \
         got k={successes_drawn}, m={draws}, K={successes}, M={population}"
    )]
    InvalidHypParams {
        successes_drawn: u64,
        draws: u64,
        successes: u64,
        population: u64,
    },

    #[error("the tail pseudo-inverse is undefined when k = m (k={k}, m={m})")]
    InverseUndefined { k: u64, m: u64 },

    #[error("draw count m={m} exceeds population M={population}")]
    DrawsExceedPopulation { m: u64, population: u64 },

    #[error("log-probability must lie in [-inf, 0], got {0}")]
    InvalidLogProb(f64),

    #[error("confidence delta must lie strictly between 0 and 1 (ln delta = {0})")]
    InvalidConfidence(f64),

    #[error("probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),

    #[error("error count {errors} exceeds sample size {m}")]
    ErrorsExceedSample { errors: u64, m: u64 },

    #[error("sample size must be at least 1")]
    EmptySample,

    #[error("ghost sample size must be at least 1")]
    EmptyGhostSample,

    #[error("{0}")]
    InvalidGrowth(&'static str),

    #[error("{method} needs a VC dimension but the growth model is a finite class")]
    NeedsVcDimension { method: &'static str },

    #[error("compression size {d} must be smaller than the sample size {m}")]
    CompressionTooLarge { d: u64, m: u64 },

    #[error("the realizable relaxation only applies at k = 0, got k={0}")]
    NotRealizable(u64),

    #[error("log covering number must be finite and non-negative, got {0}")]
    InvalidCover(f64),

    #[error("m' scan over [{lo}, {hi}] with step {step} contains no points")]
    EmptyScan { lo: u64, hi: u64, step: u64 },

    #[error("m' optimization is not available for the {0} bound")]
    NotScannable(&'static str),

    #[error("thread pool: {0}")]
    ThreadPool(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("population {population} exceeds the exact-oracle cap {cap}")]
    AboveOracleCap { population: u64, cap: u64 },
}

pub type Result<T> = std::result::Result<T, HtiError>;
