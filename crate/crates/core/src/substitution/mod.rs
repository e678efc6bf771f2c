//! Alphabets, replacement rules, concrete grids and the operations that move
//! a grid between levels.
//!
//! One-dimensional systems are modelled as two-dimensional ones whose blocks
//! and grids are a single row tall, so everything downstream can treat both
//! cases with the same code.

mod address;
mod grid;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use address::{descendant_block_range, letter_at, BlockRange, CellAddress, Coord, Digit};
pub use grid::Grid;

/// Symbol that stands for "any letter" in patterns. Never a valid letter.
pub const WILDCARD: u8 = b'*';

const ABSENT: u8 = u8::MAX;

/// Ordered set of distinct single-byte symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    letters: Vec<u8>,
    index: [u8; 256],
}

impl Alphabet {
    pub fn new(letters: &[u8]) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::Invalid("alphabet must contain at least one letter".into()));
        }
        if letters.len() >= ABSENT as usize {
            return Err(Error::Invalid("alphabet is too large".into()));
        }
        let mut index = [ABSENT; 256];
        for (i, &letter) in letters.iter().enumerate() {
            if !letter.is_ascii_alphanumeric() {
                return Err(Error::Invalid(format!(
                    "{:?} cannot be used as a letter",
                    letter as char
                )));
            }
            if index[letter as usize] != ABSENT {
                return Err(Error::Invalid(format!(
                    "letter {:?} listed twice",
                    letter as char
                )));
            }
            index[letter as usize] = i as u8;
        }
        Ok(Self {
            letters: letters.to_vec(),
            index,
        })
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn index_of(&self, letter: u8) -> Option<usize> {
        match self.index[letter as usize] {
            ABSENT => None,
            i => Some(i as usize),
        }
    }

    pub fn contains(&self, letter: u8) -> bool {
        self.index[letter as usize] != ABSENT
    }

    pub fn check(&self, letter: u8) -> Result<()> {
        if self.contains(letter) {
            Ok(())
        } else {
            Err(Error::UnknownLetter {
                letter: letter as char,
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dimension {
    One,
    Two,
}

/// Height and width of one replacement block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BlockShape {
    pub rows: usize,
    pub cols: usize,
}

/// A complete set of replacement rules: every letter maps to a `1 x b` block
/// (one dimension) or a `b x b` block (two dimensions).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSet {
    alphabet: Alphabet,
    dimension: Dimension,
    b: usize,
    blocks: Vec<Vec<u8>>,
}

impl RuleSet {
    /// `blocks[i]` is the row-major replacement of `alphabet.letters()[i]`.
    pub fn new(alphabet: Alphabet, dimension: Dimension, b: usize, blocks: Vec<Vec<u8>>) -> Result<Self> {
        if b < 2 {
            return Err(Error::Invalid(format!("block side must be at least 2, got {b}")));
        }
        if blocks.len() != alphabet.len() {
            return Err(Error::Invalid(format!(
                "{} letters but {} replacement rules",
                alphabet.len(),
                blocks.len()
            )));
        }
        let area = match dimension {
            Dimension::One => b,
            Dimension::Two => b * b,
        };
        for (i, block) in blocks.iter().enumerate() {
            if block.len() != area {
                return Err(Error::Invalid(format!(
                    "rule for {:?} has {} cells, expected {area}",
                    alphabet.letters()[i] as char,
                    block.len()
                )));
            }
            for &cell in block {
                alphabet.check(cell)?;
            }
        }
        Ok(Self {
            alphabet,
            dimension,
            b,
            blocks,
        })
    }

    /// Builds a rule set from `(letter, "ROW/ROW/..")` pairs. The alphabet
    /// follows the order of the entries; a single row means one dimension.
    pub fn from_rules(entries: &[(char, &str)]) -> Result<Self> {
        let letters: Vec<u8> = entries.iter().map(|(c, _)| *c as u8).collect();
        let alphabet = Alphabet::new(&letters)?;
        let mut shape = None;
        let mut blocks = Vec::with_capacity(entries.len());
        for (letter, text) in entries {
            let rows: Vec<&str> = text.split('/').map(str::trim).collect();
            let width = rows[0].len();
            if rows.iter().any(|r| r.len() != width) {
                return Err(Error::Invalid(format!("rule for {letter:?} has ragged rows")));
            }
            let this = (rows.len(), width);
            match shape {
                None => shape = Some(this),
                Some(s) if s != this => {
                    return Err(Error::Invalid(format!(
                        "rule for {letter:?} is {}x{}, others are {}x{}",
                        this.0, this.1, s.0, s.1
                    )))
                }
                _ => {}
            }
            blocks.push(rows.concat().into_bytes());
        }
        let (rows, cols) = shape.expect("alphabet is non-empty");
        let dimension = match rows {
            1 => Dimension::One,
            r if r == cols => Dimension::Two,
            _ => {
                return Err(Error::Invalid(format!(
                    "two-dimensional rules must be square, got {rows}x{cols}"
                )))
            }
        };
        Self::new(alphabet, dimension, cols, blocks)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn n(&self) -> usize {
        self.alphabet.len()
    }

    pub fn block_shape(&self) -> BlockShape {
        match self.dimension {
            Dimension::One => BlockShape { rows: 1, cols: self.b },
            Dimension::Two => BlockShape {
                rows: self.b,
                cols: self.b,
            },
        }
    }

    pub fn block(&self, letter: u8) -> Option<&[u8]> {
        self.alphabet.index_of(letter).map(|i| self.blocks[i].as_slice())
    }

    pub fn block_at(&self, index: usize) -> &[u8] {
        &self.blocks[index]
    }

    /// Rule text for one letter, rows joined by `/`.
    pub fn rule_text(&self, letter: u8) -> Option<String> {
        let shape = self.block_shape();
        self.block(letter).map(|block| {
            block
                .chunks(shape.cols)
                .map(|row| String::from_utf8_lossy(row).into_owned())
                .collect::<Vec<_>>()
                .join("/")
        })
    }

    /// Same letters with each `1 x b` rule stacked into a `b x b` block of
    /// identical rows.
    pub fn with_identical_rows(&self) -> Result<Self> {
        if self.dimension != Dimension::One {
            return Err(Error::Invalid("rules are already two-dimensional".into()));
        }
        let blocks = self.blocks.iter().map(|row| row.repeat(self.b)).collect();
        Self::new(self.alphabet.clone(), Dimension::Two, self.b, blocks)
    }
}

/// Applies the replacement map `steps` times.
pub fn expand(grid: &Grid, rules: &RuleSet, steps: u32) -> Result<Grid> {
    check_grid(grid, rules)?;
    let shape = rules.block_shape();
    let mut current = grid.clone();
    for _ in 0..steps {
        let rows = current.rows() * shape.rows;
        let cols = current.cols() * shape.cols;
        let mut cells = vec![0u8; rows * cols];
        for r in 0..current.rows() {
            for c in 0..current.cols() {
                let block = rules.block(current.get(r, c)).expect("grid letters were checked");
                for (i, row) in block.chunks(shape.cols).enumerate() {
                    let start = (r * shape.rows + i) * cols + c * shape.cols;
                    cells[start..start + shape.cols].copy_from_slice(row);
                }
            }
        }
        current = Grid::new(rows, cols, cells, current.level() + 1)?;
    }
    Ok(current)
}

/// Inverse of one expansion step.
pub fn contract(grid: &Grid, rules: &RuleSet) -> Result<Grid> {
    check_grid(grid, rules)?;
    if grid.level() < 2 {
        return Err(Error::Invalid("a level-1 grid has no previous level".into()));
    }
    let shape = rules.block_shape();
    if !grid.rows().is_multiple_of(shape.rows) || !grid.cols().is_multiple_of(shape.cols) {
        return Err(Error::Invalid(format!(
            "{}x{} grid is not divisible into {}x{} blocks",
            grid.rows(),
            grid.cols(),
            shape.rows,
            shape.cols
        )));
    }
    let inverse = inverse_table(rules)?;
    let rows = grid.rows() / shape.rows;
    let cols = grid.cols() / shape.cols;
    let mut cells = Vec::with_capacity(rows * cols);
    let mut block = Vec::with_capacity(shape.rows * shape.cols);
    for r in 0..rows {
        for c in 0..cols {
            block.clear();
            for i in 0..shape.rows {
                for j in 0..shape.cols {
                    block.push(grid.get(r * shape.rows + i, c * shape.cols + j));
                }
            }
            match inverse.get(block.as_slice()) {
                Some(&letter) => cells.push(letter),
                None => {
                    return Err(Error::NotContractible {
                        row: r * shape.rows + 1,
                        col: c * shape.cols + 1,
                    })
                }
            }
        }
    }
    Grid::new(rows, cols, cells, grid.level() - 1)
}

fn inverse_table(rules: &RuleSet) -> Result<HashMap<&[u8], u8>> {
    let mut inverse: HashMap<&[u8], u8> = HashMap::new();
    for (i, &letter) in rules.alphabet().letters().iter().enumerate() {
        if let Some(&other) = inverse.get(rules.block_at(i)) {
            let colliding = rules
                .alphabet()
                .letters()
                .iter()
                .enumerate()
                .filter(|&(j, _)| rules.block_at(j) == rules.block_at(i))
                .map(|(_, &l)| l as char)
                .collect::<Vec<_>>();
            debug_assert!(colliding.contains(&(other as char)));
            return Err(Error::AmbiguousRules { letters: colliding });
        }
        inverse.insert(rules.block_at(i), letter);
    }
    Ok(inverse)
}

pub(crate) fn check_grid(grid: &Grid, rules: &RuleSet) -> Result<()> {
    if rules.dimension() == Dimension::One && grid.rows() != 1 {
        return Err(Error::Invalid(format!(
            "one-dimensional rules need a single-row grid, got {} rows",
            grid.rows()
        )));
    }
    for &cell in grid.cells() {
        rules.alphabet().check(cell)?;
    }
    Ok(())
}
