//! Brute-force ground truth for small instances.
//!
//! Forward search materializes every level and scans it. The latest
//! first-appearance computation and the rule-set sweep work from ancestor
//! patterns: adding cells to a level-1 grid can only add grounded ancestors,
//! so the worst level-1 grid for a word can always be shrunk to a filling of
//! a single ancestor pattern without lowering its first-appearance level.
//! The candidate level-1 grids are therefore exactly those fillings.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ancestry::{enumerate_parents, SearchLimits};
use crate::error::{Error, Result};
use crate::pattern::{word_to_pattern, Direction, Pattern};
use crate::substitution::{check_grid, expand, Alphabet, Dimension, Grid, RuleSet, WILDCARD};

pub const DEFAULT_CELL_CAP: u64 = 100_000_000;

/// Largest number of rule sets a sweep will enumerate.
pub const SWEEP_RULE_SET_CAP: u64 = 1 << 20;

/// Largest number of fillings tried for one ancestor pattern.
const FILL_CAP: u64 = 1 << 16;

fn level_cells(l1: &Grid, rules: &RuleSet, level: u32) -> u128 {
    let shape = rules.block_shape();
    let steps = level - 1;
    (l1.rows() as u128)
        .saturating_mul((shape.rows as u128).saturating_pow(steps))
        .saturating_mul(l1.cols() as u128)
        .saturating_mul((shape.cols as u128).saturating_pow(steps))
}

fn guard_level(l1: &Grid, rules: &RuleSet, level: u32, cell_cap: u64) -> Result<()> {
    let cells = level_cells(l1, rules, level);
    if cells > cell_cap as u128 {
        return Err(Error::ResourceLimit {
            what: "materialized cells",
            requested: cells,
            cap: cell_cap as u128,
        });
    }
    Ok(())
}

/// First level, at most `max_level`, on which the word occurs, found by
/// expanding every level in full.
pub fn forward_first_appearance(
    word: &[u8],
    direction: Direction,
    l1: &Grid,
    rules: &RuleSet,
    max_level: u32,
    cell_cap: u64,
) -> Result<Option<u32>> {
    check_grid(l1, rules)?;
    let pattern = word_to_pattern(word, direction)?;
    let mut grid = l1.clone().with_level(1);
    for level in 1..=max_level {
        if level > 1 {
            guard_level(l1, rules, level, cell_cap)?;
            grid = expand(&grid, rules, 1)?;
        }
        if pattern.first_occurrence(&grid).is_some() {
            return Ok(Some(level));
        }
    }
    Ok(None)
}

const CANONICAL: [(Direction, isize, isize); 4] = [
    (Direction::E, 0, 1),
    (Direction::S, 1, 0),
    (Direction::SE, 1, 1),
    (Direction::NE, -1, 1),
];

/// First levels of every word up to `max_len` letters in every direction,
/// collected by scanning each materialized level once.
#[derive(Clone, Debug)]
pub struct ForwardTable {
    alphabet: Alphabet,
    max_len: usize,
    /// Indexed by canonical direction, then word key; 0 means absent.
    first: Vec<Vec<u32>>,
}

impl ForwardTable {
    pub fn build(l1: &Grid, rules: &RuleSet, max_level: u32, max_len: usize, cell_cap: u64) -> Result<Self> {
        check_grid(l1, rules)?;
        let radix = rules.n() as u64 + 1;
        let size = radix.checked_pow(max_len as u32).filter(|&s| s <= 1 << 24).ok_or(Error::ResourceLimit {
            what: "forward table entries",
            requested: (radix as u128).saturating_pow(max_len as u32),
            cap: 1 << 24,
        })? as usize;
        let alphabet = rules.alphabet().clone();
        let mut first = vec![vec![0u32; size]; CANONICAL.len()];
        let mut grid = l1.clone().with_level(1);
        for level in 1..=max_level {
            if level > 1 {
                guard_level(l1, rules, level, cell_cap)?;
                grid = expand(&grid, rules, 1)?;
            }
            let index: Vec<u64> = grid
                .cells()
                .iter()
                .map(|&c| alphabet.index_of(c).expect("grid was checked") as u64 + 1)
                .collect();
            let (rows, cols) = (grid.rows() as isize, grid.cols() as isize);
            for (d, &(_, dr, dc)) in CANONICAL.iter().enumerate() {
                let table = &mut first[d];
                for r in 0..rows {
                    for c in 0..cols {
                        let mut key = 0u64;
                        let mut scale = 1u64;
                        let (mut rr, mut cc) = (r, c);
                        for _ in 0..max_len {
                            if rr < 0 || rr >= rows || cc < 0 || cc >= cols {
                                break;
                            }
                            key += index[(rr * cols + cc) as usize] * scale;
                            scale *= radix;
                            let slot = &mut table[key as usize];
                            if *slot == 0 {
                                *slot = level;
                            }
                            rr += dr;
                            cc += dc;
                        }
                    }
                }
            }
        }
        Ok(Self {
            alphabet,
            max_len,
            first,
        })
    }

    pub fn first_level(&self, word: &[u8], direction: Direction) -> Option<u32> {
        if word.is_empty() || word.len() > self.max_len {
            return None;
        }
        let (slot, reversed) = match CANONICAL.iter().position(|&(d, _, _)| d == direction) {
            Some(i) => (i, false),
            None => (
                CANONICAL
                    .iter()
                    .position(|&(d, _, _)| d == direction.reverse())
                    .expect("every direction or its reverse is canonical"),
                true,
            ),
        };
        let radix = self.alphabet.len() as u64 + 1;
        let mut key = 0u64;
        let mut scale = 1u64;
        let letters: Box<dyn Iterator<Item = &u8>> = if reversed {
            Box::new(word.iter().rev())
        } else {
            Box::new(word.iter())
        };
        for &c in letters {
            key += (self.alphabet.index_of(c)? as u64 + 1) * scale;
            scale *= radix;
        }
        match self.first[slot][key as usize] {
            0 => None,
            level => Some(level),
        }
    }
}

/// Parent lists computed once per pattern and shared between searches that
/// use the same rules.
struct AncestorGraph<'r> {
    rules: &'r RuleSet,
    product_cap: u64,
    parents: HashMap<Pattern, Vec<Pattern>>,
}

impl<'r> AncestorGraph<'r> {
    fn new(rules: &'r RuleSet, product_cap: u64) -> Self {
        Self {
            rules,
            product_cap,
            parents: HashMap::new(),
        }
    }

    /// Minimum depth of every ancestor of `target`, sorted by pattern.
    fn depths(&mut self, target: Pattern) -> Result<Vec<(Pattern, u32)>> {
        let mut depth: HashMap<Pattern, u32> = HashMap::from([(target.clone(), 0)]);
        let mut queue = VecDeque::from([target]);
        while let Some(p) = queue.pop_front() {
            let d = depth[&p];
            if !self.parents.contains_key(&p) {
                let found = enumerate_parents(&p, self.rules, self.product_cap)?
                    .into_iter()
                    .map(|q| q.pattern)
                    .collect();
                self.parents.insert(p.clone(), found);
            }
            for q in &self.parents[&p] {
                if !depth.contains_key(q) {
                    depth.insert(q.clone(), d + 1);
                    queue.push_back(q.clone());
                }
            }
        }
        let mut out: Vec<(Pattern, u32)> = depth.into_iter().collect();
        out.sort();
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Latest {
    /// `None` when no level-1 grid lets the word appear.
    pub level: Option<u32>,
    /// A level-1 grid attaining `level`.
    pub l1: Option<String>,
}

/// Latest level on which the word can appear for the first time, over every
/// choice of level-1 grid.
pub fn latest_first_appearance(word: &[u8], direction: Direction, rules: &RuleSet, limits: SearchLimits) -> Result<Latest> {
    for &c in word {
        rules.alphabet().check(c)?;
    }
    let mut graph = AncestorGraph::new(rules, limits.product_cap);
    latest_with(&mut graph, word_to_pattern(word, direction)?)
}

fn latest_with(graph: &mut AncestorGraph<'_>, target: Pattern) -> Result<Latest> {
    let mut ancestors = graph.depths(target)?;
    // deepest first, so a candidate that cannot beat the best is skipped
    ancestors.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let letters = graph.rules.alphabet().letters();
    let mut best: Option<(u32, Grid)> = None;
    for (candidate, depth) in &ancestors {
        if best.as_ref().is_some_and(|(b, _)| *b >= *depth) {
            break;
        }
        for grid in fillings(candidate, letters)? {
            let reach = ancestors
                .iter()
                .filter(|(p, _)| p.first_occurrence(&grid).is_some())
                .map(|(_, d)| *d)
                .min()
                .expect("a filling contains its own pattern");
            if best.as_ref().is_none_or(|(b, _)| reach > *b) {
                best = Some((reach, grid));
            }
        }
    }
    Ok(match best {
        Some((depth, grid)) => Latest {
            level: Some(depth + 1),
            l1: Some(grid.to_text()),
        },
        None => Latest { level: None, l1: None },
    })
}

/// Every concrete grid obtained by replacing the wildcards of `pattern`.
fn fillings(pattern: &Pattern, letters: &[u8]) -> Result<Vec<Grid>> {
    let holes: Vec<usize> = (0..pattern.cells().len())
        .filter(|&i| pattern.cells()[i] == WILDCARD)
        .collect();
    let count = (letters.len() as u128).saturating_pow(holes.len() as u32);
    if count > FILL_CAP as u128 {
        return Err(Error::ResourceLimit {
            what: "ancestor fillings",
            requested: count,
            cap: FILL_CAP as u128,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    for mut k in 0..count as usize {
        let mut cells = pattern.cells().to_vec();
        for &h in &holes {
            cells[h] = letters[k % letters.len()];
            k /= letters.len();
        }
        out.push(Grid::new(pattern.rows(), pattern.cols(), cells, 1)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepWitness {
    pub rule_set: u64,
    pub rules: Vec<String>,
    pub word: String,
    pub direction: Direction,
    pub l1: String,
    pub level: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub n: usize,
    pub b: usize,
    pub dimension: Dimension,
    pub word_len_cap: usize,
    pub rule_sets: u64,
    /// Largest latest-first-appearance level for each rule set, in
    /// enumeration order.
    pub per_rule_set: Vec<u32>,
    /// Global maximum restricted to words of length 1, 2, ...
    pub per_length: Vec<u32>,
    pub global_max: u32,
    pub witness: Option<SweepWitness>,
}

/// Letters `A`, `B`, ... used by sweeps.
pub fn sweep_alphabet(n: usize) -> Result<Alphabet> {
    if !(1..=26).contains(&n) {
        return Err(Error::Invalid(format!("sweep alphabets have 1..=26 letters, got {n}")));
    }
    Alphabet::new(&(b'A'..b'A' + n as u8).collect::<Vec<_>>())
}

/// Rule set number `index` in the enumeration of all `n^(area n)` rule sets:
/// the base-`n` digits of `index`, most significant first, spell the
/// concatenated blocks of `A`, `B`, ...
pub fn rule_set_by_index(n: usize, b: usize, dimension: Dimension, index: u64) -> Result<RuleSet> {
    let alphabet = sweep_alphabet(n)?;
    let area = match dimension {
        Dimension::One => b,
        Dimension::Two => b * b,
    };
    let digits = area * n;
    let mut cells = vec![0u8; digits];
    let mut k = index;
    for slot in cells.iter_mut().rev() {
        *slot = b'A' + (k % n as u64) as u8;
        k /= n as u64;
    }
    if k != 0 {
        return Err(Error::OutOfRange(format!("rule set {index} does not exist")));
    }
    let blocks = cells.chunks(area).map(<[u8]>::to_vec).collect();
    RuleSet::new(alphabet, dimension, b, blocks)
}

fn words_of_len(n: usize, len: usize) -> Vec<Vec<u8>> {
    let total = n.pow(len as u32);
    (0..total)
        .map(|mut k| {
            let mut w = vec![b'A'; len];
            for slot in w.iter_mut().rev() {
                *slot = b'A' + (k % n) as u8;
                k /= n;
            }
            w
        })
        .collect()
}

struct RuleSetSummary {
    max: u32,
    per_length: Vec<u32>,
    best: Option<(u32, Vec<u8>, Direction, String)>,
}

/// Latest first appearance over every rule set of the given shape and every
/// word of at most `word_len_cap` letters. One-dimensional sweeps search
/// words left to right; two-dimensional sweeps use E, S, SE and NE.
pub fn sweep_max_latest(
    n: usize,
    b: usize,
    dimension: Dimension,
    word_len_cap: usize,
    limits: SearchLimits,
) -> Result<SweepReport> {
    if word_len_cap == 0 {
        return Err(Error::Invalid("word length cap must be at least 1".into()));
    }
    if dimension == Dimension::Two && n > 2 {
        return Err(Error::Invalid("two-dimensional sweeps are limited to n <= 2".into()));
    }
    let area = match dimension {
        Dimension::One => b,
        Dimension::Two => b * b,
    };
    let rule_sets = (n as u128).saturating_pow((area * n) as u32);
    if rule_sets > SWEEP_RULE_SET_CAP as u128 {
        return Err(Error::ResourceLimit {
            what: "rule sets",
            requested: rule_sets,
            cap: SWEEP_RULE_SET_CAP as u128,
        });
    }
    let rule_sets = rule_sets as u64;
    let directions: &[Direction] = match dimension {
        Dimension::One => &[Direction::E],
        Dimension::Two => &[Direction::E, Direction::S, Direction::SE, Direction::NE],
    };
    let words: Vec<Vec<u8>> = (1..=word_len_cap).flat_map(|len| words_of_len(n, len)).collect();

    let summaries: Vec<RuleSetSummary> = (0..rule_sets)
        .into_par_iter()
        .map(|index| {
            let rules = rule_set_by_index(n, b, dimension, index)?;
            let mut graph = AncestorGraph::new(&rules, limits.product_cap);
            let mut summary = RuleSetSummary {
                max: 0,
                per_length: vec![0; word_len_cap],
                best: None,
            };
            for word in &words {
                for &direction in directions {
                    let latest = latest_with(&mut graph, word_to_pattern(word, direction)?)?;
                    let (Some(level), Some(l1)) = (latest.level, latest.l1) else { continue };
                    let slot = &mut summary.per_length[word.len() - 1];
                    *slot = (*slot).max(level);
                    if level > summary.max {
                        summary.max = level;
                        summary.best = Some((level, word.clone(), direction, l1));
                    }
                }
            }
            Ok(summary)
        })
        .collect::<Result<_>>()?;

    let mut per_length = vec![0u32; word_len_cap];
    let mut global_max = 0;
    let mut witness = None;
    for (index, s) in summaries.iter().enumerate() {
        for (slot, &v) in per_length.iter_mut().zip(&s.per_length) {
            *slot = (*slot).max(v);
        }
        if s.max > global_max {
            global_max = s.max;
            let (level, word, direction, l1) = s.best.clone().expect("max above zero has a witness");
            let rules = rule_set_by_index(n, b, dimension, index as u64)?;
            witness = Some(SweepWitness {
                rule_set: index as u64,
                rules: rules
                    .alphabet()
                    .letters()
                    .iter()
                    .map(|&l| format!("{}={}", l as char, rules.rule_text(l).expect("letter has a rule")))
                    .collect(),
                word: String::from_utf8_lossy(&word).into_owned(),
                direction,
                l1,
                level,
            });
        }
    }

    if let Some(w) = &witness {
        let rules = rule_set_by_index(n, b, dimension, w.rule_set)?;
        let l1 = Grid::parse(&w.l1, 1)?;
        let forward = forward_first_appearance(w.word.as_bytes(), w.direction, &l1, &rules, w.level, DEFAULT_CELL_CAP)?;
        if forward != Some(w.level) {
            return Err(Error::Invariant(format!(
                "sweep witness {} from {} re-validates to {forward:?}, expected level {}",
                w.word, w.l1, w.level
            )));
        }
    }

    Ok(SweepReport {
        n,
        b,
        dimension,
        word_len_cap,
        rule_sets,
        per_rule_set: summaries.iter().map(|s| s.max).collect(),
        per_length,
        global_max,
        witness,
    })
}
