//! Backward search over ancestor patterns.
//!
//! Instead of materializing levels, a word is traced upwards: its parents
//! are the patterns one level up whose expansion can contain it. The first
//! depth at which some ancestor occurs in level 1 gives the earliest level
//! on which the word appears.

mod parents;
mod search;
mod tree;

pub use parents::{enumerate_parents, Parent, DEFAULT_PRODUCT_CAP};
pub use search::{
    ancestor_depths, first_appearance, witness_coordinates, word_addresses, Found, Outcome, SearchLimits,
    SearchResult, SearchStats,
};
pub use tree::{ancestor_tree, NodeStatus, TreeNode};

pub(crate) use search::{all_grounded_cells, search_pattern, Bounded};
