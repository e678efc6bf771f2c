//! Word search over letter-substitution grids.
//!
//! A level-1 grid grows by replacing every letter with a fixed block, level
//! after level. Levels soon become too large to write down, so words are
//! located by searching backwards from the word through the patterns that
//! could have produced it, until one of them turns up in level 1.

pub mod ancestry;
pub mod bounds;
mod error;
pub mod format;
pub mod oracle;
pub mod pattern;
pub mod puzzle;
pub mod substitution;

pub use ancestry::{ancestor_tree, enumerate_parents, first_appearance, SearchLimits, SearchResult};
pub use error::{Error, Result};
pub use pattern::{word_to_pattern, Direction, Pattern};
pub use substitution::{contract, expand, letter_at, CellAddress, Dimension, Grid, RuleSet};

/// Arbitrary-magnitude coordinate, needed for deep levels.
pub type BigCoord = num_bigint::BigUint;
/// Coordinate type for levels small enough to fit a machine word.
pub type SmallCoord = u64;

pub type BigBlockRange = substitution::BlockRange<BigCoord>;
pub type SmallBlockRange = substitution::BlockRange<SmallCoord>;
