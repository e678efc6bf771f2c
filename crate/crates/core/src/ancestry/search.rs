use std::collections::HashMap;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::parents::{enumerate_parents, Parent, DEFAULT_PRODUCT_CAP};
use crate::error::{Error, Result};
use crate::pattern::{occurrences, word_to_pattern, Direction, Pattern};
use crate::substitution::{check_grid, letter_at, CellAddress, Digit, Grid, RuleSet};

/// Frontiers smaller than this are expanded on the calling thread.
const PARALLEL_FRONTIER: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Deepest ancestor depth to explore; `None` runs to the fixpoint.
    pub depth_cap: Option<u32>,
    pub product_cap: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            depth_cap: None,
            product_cap: DEFAULT_PRODUCT_CAP,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes_expanded: u64,
    pub patterns_memoized: u64,
    pub depth_reached: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Found {
    pub level: u32,
    pub target: Pattern,
    /// Ancestor that occurs in level 1.
    pub ancestor: Pattern,
    /// 1-based top-left of the ancestor in level 1.
    pub anchor: (usize, usize),
    /// Alignment digits from the ancestor down to the target; together with
    /// `anchor` this is the digit path of the target's top-left cell.
    pub offsets: Vec<Digit>,
}

impl Found {
    pub fn top_left(&self) -> CellAddress {
        CellAddress {
            level: self.level,
            l1_row: self.anchor.0,
            l1_col: self.anchor.1,
            path: self.offsets.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Found(Found),
    NeverAppears { max_depth: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub outcome: Outcome,
    pub stats: SearchStats,
}

impl SearchResult {
    pub fn level(&self) -> Option<u32> {
        match &self.outcome {
            Outcome::Found(f) => Some(f.level),
            Outcome::NeverAppears { .. } => None,
        }
    }

    pub fn found(&self) -> Option<&Found> {
        match &self.outcome {
            Outcome::Found(f) => Some(f),
            Outcome::NeverAppears { .. } => None,
        }
    }
}

struct Node {
    pattern: Pattern,
    /// Child this pattern was first generated from, with the alignment.
    link: Option<(usize, Digit)>,
}

/// Breadth-first exploration of the ancestor patterns of one target.
///
/// Patterns are memoized globally: a pattern first reached at depth `d`
/// is never expanded again, since a later copy could only ground later.
pub(crate) struct Explorer<'a> {
    rules: &'a RuleSet,
    product_cap: u64,
    nodes: Vec<Node>,
    index: HashMap<Pattern, usize>,
    frontier: Vec<usize>,
    depth: u32,
    stats: SearchStats,
}

impl<'a> Explorer<'a> {
    pub(crate) fn new(target: Pattern, rules: &'a RuleSet, product_cap: u64) -> Self {
        let mut index = HashMap::new();
        index.insert(target.clone(), 0);
        Self {
            rules,
            product_cap,
            nodes: vec![Node {
                pattern: target,
                link: None,
            }],
            index,
            frontier: vec![0],
            depth: 0,
            stats: SearchStats {
                patterns_memoized: 1,
                ..SearchStats::default()
            },
        }
    }

    pub(crate) fn depth(&self) -> u32 {
        self.depth
    }

    pub(crate) fn is_exhausted(&self) -> bool {
        self.frontier.is_empty()
    }

    pub(crate) fn stats(&self) -> SearchStats {
        self.stats.clone()
    }

    /// Replaces the frontier with the never-seen parents of its patterns.
    pub(crate) fn advance(&mut self) -> Result<()> {
        let rules = self.rules;
        let cap = self.product_cap;
        let expand_one = |&id: &usize| enumerate_parents(&self.nodes[id].pattern, rules, cap);
        let expanded: Vec<Vec<Parent>> = if self.frontier.len() >= PARALLEL_FRONTIER {
            self.frontier.par_iter().map(expand_one).collect::<Result<_>>()?
        } else {
            self.frontier.iter().map(expand_one).collect::<Result<_>>()?
        };
        self.stats.nodes_expanded += self.frontier.len() as u64;
        let mut next = Vec::new();
        for (&child, parents) in self.frontier.iter().zip(expanded) {
            for parent in parents {
                if self.index.contains_key(&parent.pattern) {
                    continue;
                }
                let id = self.nodes.len();
                self.index.insert(parent.pattern.clone(), id);
                self.nodes.push(Node {
                    pattern: parent.pattern,
                    link: Some((child, parent.offset)),
                });
                next.push(id);
            }
        }
        self.frontier = next;
        self.depth += 1;
        self.stats.patterns_memoized = self.nodes.len() as u64;
        self.stats.depth_reached = self.depth;
        Ok(())
    }

    /// Best grounded frontier pattern: smallest (row, col, pattern text).
    fn ground(&self, l1: &Grid) -> Option<(usize, (usize, usize))> {
        self.frontier
            .iter()
            .filter_map(|&id| self.nodes[id].pattern.first_occurrence(l1).map(|pos| (id, pos)))
            .min_by(|a, b| {
                (a.1, &self.nodes[a.0].pattern).cmp(&(b.1, &self.nodes[b.0].pattern))
            })
    }

    fn witness(&self, id: usize, pos: (usize, usize)) -> Found {
        let mut offsets = Vec::new();
        let mut cursor = id;
        while let Some((child, offset)) = self.nodes[cursor].link {
            offsets.push(offset);
            cursor = child;
        }
        Found {
            level: self.depth + 1,
            target: self.nodes[0].pattern.clone(),
            ancestor: self.nodes[id].pattern.clone(),
            anchor: (pos.0 + 1, pos.1 + 1),
            offsets,
        }
    }

    /// Every memoized pattern with the depth it was first reached at.
    pub(crate) fn into_depths(self) -> Vec<(Pattern, u32)> {
        let mut depth = vec![0u32; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            if let Some((child, _)) = node.link {
                depth[i] = depth[child] + 1;
            }
        }
        self.nodes.into_iter().map(|n| n.pattern).zip(depth).collect()
    }
}

pub(crate) enum Bounded {
    Found(Found),
    Never,
    /// The depth limit was hit with patterns still to explore.
    Capped,
}

pub(crate) fn search_pattern(
    target: Pattern,
    l1: &Grid,
    rules: &RuleSet,
    limits: SearchLimits,
) -> Result<(Bounded, SearchStats)> {
    let mut explorer = Explorer::new(target, rules, limits.product_cap);
    loop {
        if let Some((id, pos)) = explorer.ground(l1) {
            let found = explorer.witness(id, pos);
            return Ok((Bounded::Found(found), explorer.stats()));
        }
        if explorer.is_exhausted() {
            return Ok((Bounded::Never, explorer.stats()));
        }
        if limits.depth_cap.is_some_and(|cap| explorer.depth() >= cap) {
            return Ok((Bounded::Capped, explorer.stats()));
        }
        explorer.advance()?;
    }
}

/// Level-1 cells under every occurrence of `target` on `level`, the level
/// it first appears on. Any occurrence there grounds through a pattern
/// first reached at depth `level - 1`, so the final frontier covers them all.
pub(crate) fn all_grounded_cells(
    target: Pattern,
    level: u32,
    l1: &Grid,
    rules: &RuleSet,
    product_cap: u64,
) -> Result<Vec<(usize, usize)>> {
    let mut explorer = Explorer::new(target, rules, product_cap);
    while explorer.depth() + 1 < level {
        explorer.advance()?;
    }
    let mut cells = Vec::new();
    for &id in &explorer.frontier {
        let pattern = &explorer.nodes[id].pattern;
        for (r, c) in occurrences(pattern, l1) {
            cells.extend(pattern.concrete_cells().map(|(dr, dc, _)| (r + dr, c + dc)));
        }
    }
    cells.sort_unstable();
    cells.dedup();
    Ok(cells)
}

fn check_word(word: &[u8], rules: &RuleSet) -> Result<()> {
    if word.is_empty() {
        return Err(Error::Invalid("empty word".into()));
    }
    word.iter().try_for_each(|&c| rules.alphabet().check(c))
}

/// Earliest level on which `word` appears in `direction` when the system
/// starts from `l1`.
pub fn first_appearance(
    word: &[u8],
    direction: Direction,
    l1: &Grid,
    rules: &RuleSet,
    limits: SearchLimits,
) -> Result<SearchResult> {
    check_word(word, rules)?;
    check_grid(l1, rules)?;
    if l1.level() != 1 {
        return Err(Error::Invalid(format!(
            "search starts from a level-1 grid, got level {}",
            l1.level()
        )));
    }
    let target = word_to_pattern(word, direction)?;
    let (bounded, stats) = search_pattern(target, l1, rules, limits)?;
    let outcome = match bounded {
        Bounded::Found(found) => Outcome::Found(found),
        Bounded::Never => Outcome::NeverAppears {
            max_depth: stats.depth_reached,
        },
        Bounded::Capped => {
            return Err(Error::Unresolved {
                depth: stats.depth_reached,
                stats,
            })
        }
    };
    Ok(SearchResult { outcome, stats })
}

/// Every ancestor pattern of `target`, paired with the smallest number of
/// levels separating it from the target. The target itself has depth 0.
pub fn ancestor_depths(target: Pattern, rules: &RuleSet, limits: SearchLimits) -> Result<Vec<(Pattern, u32)>> {
    let mut explorer = Explorer::new(target, rules, limits.product_cap);
    while !explorer.is_exhausted() {
        if limits.depth_cap.is_some_and(|cap| explorer.depth() >= cap) {
            let stats = explorer.stats();
            return Err(Error::Unresolved {
                depth: stats.depth_reached,
                stats,
            });
        }
        explorer.advance()?;
    }
    Ok(explorer.into_depths())
}

/// Absolute addresses of the target's letters, row-major, each checked
/// against a direct [`letter_at`] lookup.
pub fn witness_coordinates(found: &Found, l1: &Grid, rules: &RuleSet) -> Result<Vec<CellAddress>> {
    witness_cells(found, l1, rules, found.target.concrete_cells().map(|(r, c, _)| (r, c)))
}

/// Addresses of the letters of a word laid out in `direction`, in reading
/// order.
pub fn word_addresses(found: &Found, direction: Direction, l1: &Grid, rules: &RuleSet) -> Result<Vec<CellAddress>> {
    let len = found.target.concrete_count();
    witness_cells(found, l1, rules, (0..len).map(|i| direction.cell(i, len)))
}

fn witness_cells(
    found: &Found,
    l1: &Grid,
    rules: &RuleSet,
    cells: impl Iterator<Item = (usize, usize)>,
) -> Result<Vec<CellAddress>> {
    let shape = rules.block_shape();
    let top_left = found.top_left();
    if top_left.path.len() + 1 != found.level as usize {
        return Err(Error::Invariant(format!(
            "offset chain of length {} for a level-{} witness",
            top_left.path.len(),
            found.level
        )));
    }
    let mut out = Vec::new();
    for (r, c) in cells {
        let addr = top_left.offset::<BigUint>(r, c, shape)?;
        let want = found.target.get(r, c);
        let got = letter_at(l1, rules, &addr)?;
        if got != want {
            return Err(Error::Invariant(format!(
                "witness cell ({r}, {c}) resolves to {:?}, expected {:?}",
                got as char, want as char
            )));
        }
        out.push(addr);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::substitution::expand;

    fn example1() -> RuleSet {
        RuleSet::from_rules(&[('A', "AB"), ('B', "AC"), ('C', "BB")]).unwrap()
    }

    fn example2d() -> RuleSet {
        RuleSet::from_rules(&[('A', "AB/CB"), ('B', "AC/BB"), ('C', "BB/CC")]).unwrap()
    }

    fn level(word: &str, dir: Direction, l1: &str, rules: &RuleSet) -> Option<u32> {
        let l1 = Grid::parse(l1, 1).unwrap();
        first_appearance(word.as_bytes(), dir, &l1, rules, SearchLimits::default())
            .unwrap()
            .level()
    }

    #[test]
    fn worked_examples() {
        assert_eq!(level("CACABA", Direction::E, "A", &example1()), Some(6));
        assert_eq!(level("CAB", Direction::E, "A", &example1()), Some(4));
        assert_eq!(level("CC", Direction::E, "A", &example1()), None);
        assert_eq!(level("A", Direction::E, "CCC", &example1()), Some(3));
        assert_eq!(level("BB", Direction::SE, "A", &example2d()), Some(3));
        assert_eq!(level("AA", Direction::SE, "A", &example2d()), None);
    }

    #[test]
    fn level_one_witness_is_the_occurrence() {
        let rules = example1();
        let l1 = Grid::parse("CABAB", 1).unwrap();
        let result = first_appearance(b"AB", Direction::E, &l1, &rules, SearchLimits::default()).unwrap();
        let found = result.found().unwrap();
        assert_eq!(found.level, 1);
        let addrs = witness_coordinates(found, &l1, &rules).unwrap();
        assert_eq!(addrs, vec![CellAddress::l1(1, 2), CellAddress::l1(1, 3)]);
    }

    #[test]
    fn cacaba_witness_spells_the_word() {
        let rules = example1();
        let l1 = Grid::parse("A", 1).unwrap();
        let result = first_appearance(b"CACABA", Direction::E, &l1, &rules, SearchLimits::default()).unwrap();
        let found = result.found().unwrap();
        let addrs = word_addresses(found, Direction::E, &l1, &rules).unwrap();
        let l6 = expand(&l1, &rules, 5).unwrap();
        assert_eq!(l6.to_text(), "ABACABBBABACACACABACABBBABBBABBB");
        let shape = rules.block_shape();
        let spelled: String = addrs
            .iter()
            .map(|a| {
                let col: u64 = a.col(shape);
                assert!((1..=32).contains(&col));
                l6.get(0, col as usize - 1) as char
            })
            .collect();
        assert_eq!(spelled, "CACABA");
    }

    #[test]
    fn depth_cap_reports_unresolved() {
        let rules = example1();
        let l1 = Grid::parse("A", 1).unwrap();
        let limits = SearchLimits {
            depth_cap: Some(2),
            ..SearchLimits::default()
        };
        let err = first_appearance(b"CACABA", Direction::E, &l1, &rules, limits).unwrap_err();
        assert!(matches!(err, Error::Unresolved { depth: 2, .. }));
    }

    #[test]
    fn rejects_bad_inputs() {
        let rules = example1();
        let l1 = Grid::parse("A", 1).unwrap();
        let limits = SearchLimits::default();
        assert!(first_appearance(b"", Direction::E, &l1, &rules, limits).is_err());
        assert!(first_appearance(b"AZ", Direction::E, &l1, &rules, limits).is_err());
        let l2 = Grid::parse("AB", 2).unwrap();
        assert!(first_appearance(b"A", Direction::E, &l2, &rules, limits).is_err());
    }
}
