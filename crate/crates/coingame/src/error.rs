use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("probability {0} outside the open interval (0,1)")]
    InvalidProbability(f64),

    #[error("Kullback divergence undefined: second argument {0} must lie in (0,1)")]
    KlDomain(f64),

    #[error("probability vector of length {0} has entry {1} <= 0")]
    KlZeroEntry(usize, f64),

    #[error("probability vectors have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("vector does not sum to 1 (sum = {0})")]
    NotNormalized(f64),

    #[error("predictor returned p = {p} outside [0,1] at round {round}")]
    PredictorRange { round: usize, p: f64 },

    #[error("strategy is not prudent: capital {capital} after path {path}")]
    NotPrudent { path: String, capital: f64 },

    #[error("invalid hyperparameter: {0}")]
    InvalidParameter(String),

    #[error("invalid transition table: {0}")]
    InvalidTransitions(String),

    #[error("Markov source is not ergodic: transition graph has {0} recurrent classes")]
    NonErgodic(usize),

    #[error("entropy rate is not computable for this source")]
    EntropyUnavailable,

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("fractional Brownian synthesis failed: {0}")]
    Synthesis(String),

    #[error("embedding failed at level {level}: {msg}")]
    Embedding { level: u32, msg: String },

    #[error("invalid price path: {0}")]
    InvalidPath(String),

    #[error("mixture has no components")]
    EmptyMixture,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
