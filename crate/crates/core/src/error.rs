use thiserror::Error;

/// Errors produced by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("size {m} is odd; the element universe must have even size")]
    OddSize { m: usize },

    #[error("map is not a permutation: index {index} maps to {value}, which is out of range or repeated")]
    NotPermutation { index: usize, value: usize },

    #[error("map is not self-inverse at index {index}: map[{index}] = {image} but map[{image}] = {back}")]
    NotSelfInverse {
        index: usize,
        image: usize,
        back: usize,
    },

    #[error("parity mismatch: m - f must be even (m = {m}, f = {f})")]
    ParityMismatch { m: usize, f: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("enumeration of {count} vectors exceeds the limit of {limit}")]
    TooLarge { count: String, limit: u64 },

    #[error("map is not a bijection: index {index} maps to {value}, which is out of range or repeated")]
    NotBijection { index: usize, value: usize },

    #[error("requested set size {requested} is smaller than the {unrepresented} unrepresented elements")]
    TooSmall {
        requested: usize,
        unrepresented: usize,
    },

    #[error("{p} is not prime")]
    NotPrime { p: u64 },

    #[error("{0}")]
    Range(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }

    /// True for errors caused by caller input rather than by I/O or internal failure.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Csv(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
