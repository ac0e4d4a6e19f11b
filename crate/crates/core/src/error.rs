//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("score {value} outside [-3, 3]")]
    ScoreOutOfRange { value: f64 },

    #[error("rating {value} outside the integer range [-3, 3]")]
    RatingOutOfRange { value: i64 },

    #[error("duplicate term '{term}'")]
    DuplicateTerm { term: String },

    #[error("duplicate gold term '{term}'")]
    DuplicateGoldTerm { term: String },

    #[error("unknown questionnaire option '{option}'")]
    UnknownOption { option: String },

    #[error("empty term after normalization")]
    EmptyTerm,

    #[error("lexicon '{name}' is empty")]
    EmptyLexicon { name: String },

    #[error("empty input: {what}")]
    EmptyInput { what: String },

    #[error("series of length {len} is too short (need at least {min})")]
    SeriesTooShort { len: usize, min: usize },

    #[error("paired series length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("degenerate series: {which} has zero variance")]
    DegenerateVariance { which: String },

    #[error("no term has at least 2 responses")]
    NoEligibleTerms,

    #[error("fewer than 2 eligible terms ({n}); correlation is undefined")]
    TooFewTerms { n: usize },

    #[error("invalid class scheme: {msg}")]
    InvalidScheme { msg: String },

    #[error("invalid bin spec: {msg}")]
    InvalidBinSpec { msg: String },

    #[error("stream of {len} posts is shorter than bin size {bin}")]
    StreamShorterThanBin { len: usize, bin: usize },

    #[error("post {index} has no gold label")]
    UnlabeledPost { index: usize },

    #[error("post {index} has no timestamp (required for time-mode binning)")]
    MissingTimestamp { index: usize },

    #[error("arcs share only {n} bins; need at least 2 to evaluate")]
    TooFewCommonBins { n: usize },

    #[error("slope {slope} outside [-90, 90] degrees")]
    SlopeOutOfRange { slope: f64 },

    #[error("invalid sampler config: {msg}")]
    InvalidSamplerConfig { msg: String },

    #[error("corpus has no {which} posts")]
    EmptyPool { which: String },

    #[error("post {index} has non-binary label {value}; corpus labels must be 0 or 1")]
    NonBinaryLabel { index: usize, value: f64 },

    #[error("need at least 2 resources to join, got {n}")]
    TooFewResources { n: usize },

    #[error("joined resources share no terms")]
    EmptyJoin,

    #[error("resource '{name}' has constant scores over the join; correlation is undefined")]
    DegenerateResource { name: String },

    #[error("threshold must be positive, got {value}")]
    NonPositiveThreshold { value: f64 },

    #[error("age of acquisition must be positive, got {value}")]
    NonPositiveAoa { value: f64 },

    #[error("resource '{name}' not present in join")]
    MissingResource { name: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
}
