use thiserror::Error;

use crate::ancestry::SearchStats;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("letter {letter:?} is not in the alphabet")]
    UnknownLetter { letter: char },

    #[error("block at row {row}, col {col} matches no replacement rule")]
    NotContractible { row: usize, col: usize },

    #[error("letters {letters:?} share the same replacement block; contraction is ambiguous")]
    AmbiguousRules { letters: Vec<char> },

    #[error("address out of range: {0}")]
    OutOfRange(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("resource limit exceeded: {what} would reach {requested}, cap is {cap}")]
    ResourceLimit {
        what: &'static str,
        requested: u128,
        cap: u128,
    },

    #[error("search unresolved at depth {depth} with a non-empty frontier ({} patterns memoized)", stats.patterns_memoized)]
    Unresolved { depth: u32, stats: SearchStats },

    #[error("word {word} never appears")]
    NeverAppears { word: String },

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Resource-cap failures are reported separately from domain errors.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::ResourceLimit { .. } | Error::Unresolved { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
