use thiserror::Error;

/// Errors raised by the structure-sensitive information measures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("subset has zero probability mass")]
    ZeroMassSubset,

    #[error("partition does not cover the alphabet: {0}")]
    PartitionMismatch(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("unknown letter `{0}`")]
    UnknownLetter(String),

    #[error("duplicate letter `{0}`")]
    DuplicateLetter(String),

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("empty letter subset")]
    EmptySubset,

    #[error("distance matrix is not ultrametric: D({a},{b}) > max(D({a},{c}), D({b},{c}))")]
    NotUltrametric { a: String, b: String, c: String },

    #[error("invalid distance matrix: {0}")]
    InvalidDistance(String),

    #[error("not normalized: {0}")]
    NotNormalized(String),

    #[error("side `{0}` of the binary partition has zero probability mass")]
    ZeroMassSide(String),

    #[error("degenerate split: H(P^t) = 0")]
    DegenerateSplit,

    #[error("invalid binary split: {0}")]
    InvalidSplit(String),

    #[error("at least {needed} letters required, got {got}")]
    TooFewLetters { needed: usize, got: usize },

    #[error("at least 2 points required, got {0}")]
    TooFewPoints(usize),

    #[error("duplicate value {0} in point set")]
    DuplicateValues(f64),

    #[error("points are not strictly increasing at index {0}")]
    NotIncreasing(usize),

    #[error("cdf is not monotone near x = {0}")]
    NonMonotoneCdf(f64),

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("sequence space too large: {size} sequences exceed the cap of {cap}")]
    SpaceTooLarge { size: f64, cap: f64 },

    #[error("optimization exceeded the restart cap of {0}")]
    IterationCap(usize),

    #[error("invalid code tree: {0}")]
    InvalidCodeTree(String),

    #[error("parse error at {location}: {reason}")]
    Parse { location: String, reason: String },

    #[error("validation error: {0}")]
    Validation(String),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by malformed input text, as opposed to
    /// well-formed input that violates a domain constraint.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
