//! Letter-or-wildcard rectangles and the eight word directions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::substitution::{Grid, WILDCARD};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    E,
    W,
    S,
    N,
    SE,
    NE,
    SW,
    NW,
}

impl Direction {
    pub const ALL: [Direction; 8] = [
        Direction::E,
        Direction::W,
        Direction::S,
        Direction::N,
        Direction::SE,
        Direction::NE,
        Direction::SW,
        Direction::NW,
    ];

    pub fn is_diagonal(self) -> bool {
        matches!(self, Direction::SE | Direction::NE | Direction::SW | Direction::NW)
    }

    /// Direction that reads the same cells backwards.
    pub fn reverse(self) -> Direction {
        match self {
            Direction::E => Direction::W,
            Direction::W => Direction::E,
            Direction::S => Direction::N,
            Direction::N => Direction::S,
            Direction::SE => Direction::NW,
            Direction::NW => Direction::SE,
            Direction::NE => Direction::SW,
            Direction::SW => Direction::NE,
        }
    }

    /// Box position (0-based row, col) of the `i`-th letter of a word of
    /// length `len` laid out in this direction.
    pub fn cell(self, i: usize, len: usize) -> (usize, usize) {
        let last = len - 1;
        match self {
            Direction::E => (0, i),
            Direction::W => (0, last - i),
            Direction::S => (i, 0),
            Direction::N => (last - i, 0),
            Direction::SE => (i, i),
            Direction::NW => (last - i, last - i),
            Direction::NE => (last - i, i),
            Direction::SW => (i, last - i),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::E => "E",
            Direction::W => "W",
            Direction::S => "S",
            Direction::N => "N",
            Direction::SE => "SE",
            Direction::NE => "NE",
            Direction::SW => "SW",
            Direction::NW => "NW",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Direction::ALL
            .into_iter()
            .find(|d| d.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Invalid(format!("unknown direction {s:?}")))
    }
}

/// A trimmed rectangle of letters and wildcards.
///
/// Every border row and column holds at least one letter, so the rectangle
/// is the bounding box of its letters.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    rows: usize,
    cols: usize,
    cells: Vec<u8>,
}

impl Pattern {
    /// Builds a pattern and trims it to the bounding box of its letters.
    pub fn new(rows: usize, cols: usize, cells: Vec<u8>) -> Result<Self> {
        if rows == 0 || cols == 0 || cells.len() != rows * cols {
            return Err(Error::Invalid(format!(
                "{} cells do not fill a {rows}x{cols} pattern",
                cells.len()
            )));
        }
        Self::untrimmed(rows, cols, cells).trim()
    }

    fn untrimmed(rows: usize, cols: usize, cells: Vec<u8>) -> Self {
        Self { rows, cols, cells }
    }

    /// Crate-internal constructor for boxes already known to be trimmed.
    pub(crate) fn from_trimmed(rows: usize, cols: usize, cells: Vec<u8>) -> Self {
        debug_assert!(Self::untrimmed(rows, cols, cells.clone()).is_trimmed());
        Self { rows, cols, cells }
    }

    /// Parses rows joined by `/` with `*` as the wildcard.
    pub fn parse(text: &str) -> Result<Self> {
        let rows: Vec<&str> = text.trim().split('/').collect();
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Invalid(format!("pattern {text:?} has ragged rows")));
        }
        let cells: Vec<u8> = rows.concat().into_bytes();
        if let Some(&bad) = cells.iter().find(|&&c| c != WILDCARD && !c.is_ascii_alphanumeric()) {
            return Err(Error::Invalid(format!("pattern contains {:?}", bad as char)));
        }
        Self::new(rows.len(), cols, cells)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.cells[row * self.cols + col]
    }

    pub fn concrete_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c != WILDCARD).count()
    }

    /// Letters with their (row, col) offsets, row-major.
    pub fn concrete_cells(&self) -> impl Iterator<Item = (usize, usize, u8)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != WILDCARD)
            .map(|(i, &c)| (i / self.cols, i % self.cols, c))
    }

    pub fn is_trimmed(&self) -> bool {
        let row_has = |r: usize| (0..self.cols).any(|c| self.get(r, c) != WILDCARD);
        let col_has = |c: usize| (0..self.rows).any(|r| self.get(r, c) != WILDCARD);
        row_has(0) && row_has(self.rows - 1) && col_has(0) && col_has(self.cols - 1)
    }

    /// Drops all-wildcard border rows and columns.
    pub fn trim(self) -> Result<Self> {
        let mut top = usize::MAX;
        let mut bottom = 0;
        let mut left = usize::MAX;
        let mut right = 0;
        for (r, c, _) in self.concrete_cells() {
            top = top.min(r);
            bottom = bottom.max(r);
            left = left.min(c);
            right = right.max(c);
        }
        if top == usize::MAX {
            return Err(Error::Invalid("pattern has no letters".into()));
        }
        if top == 0 && left == 0 && bottom == self.rows - 1 && right == self.cols - 1 {
            return Ok(self);
        }
        let cols = right - left + 1;
        let mut cells = Vec::with_capacity((bottom - top + 1) * cols);
        for r in top..=bottom {
            cells.extend_from_slice(&self.cells[r * self.cols + left..r * self.cols + right + 1]);
        }
        Ok(Self::untrimmed(bottom - top + 1, cols, cells))
    }

    /// Rows joined by `/`.
    pub fn text(&self) -> String {
        let mut out = String::with_capacity(self.cells.len() + self.rows);
        for (i, row) in self.cells.chunks(self.cols).enumerate() {
            if i > 0 {
                out.push('/');
            }
            out.extend(row.iter().map(|&c| c as char));
        }
        out
    }

    /// Whether the pattern fits at 0-based (row, col) of `grid` with every
    /// letter matching.
    #[inline]
    pub fn matches_at(&self, grid: &Grid, row: usize, col: usize) -> bool {
        if row + self.rows > grid.rows() || col + self.cols > grid.cols() {
            return false;
        }
        for r in 0..self.rows {
            let want = &self.cells[r * self.cols..(r + 1) * self.cols];
            let have = &grid.row(row + r)[col..col + self.cols];
            if want.iter().zip(have).any(|(&w, &h)| w != WILDCARD && w != h) {
                return false;
            }
        }
        true
    }

    /// First occurrence in row-major order (0-based).
    pub fn first_occurrence(&self, grid: &Grid) -> Option<(usize, usize)> {
        if self.rows > grid.rows() || self.cols > grid.cols() {
            return None;
        }
        (0..=grid.rows() - self.rows)
            .flat_map(|r| (0..=grid.cols() - self.cols).map(move |c| (r, c)))
            .find(|&(r, c)| self.matches_at(grid, r, c))
    }
}

impl Pattern {
    fn text_bytes(&self) -> impl Iterator<Item = u8> + '_ {
        self.cells.chunks(self.cols).enumerate().flat_map(|(i, row)| {
            let sep = if i > 0 { Some(b'/') } else { None };
            sep.into_iter().chain(row.iter().copied())
        })
    }
}

/// Orders patterns by their `/`-joined text.
impl Ord for Pattern {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.text_bytes().cmp(other.text_bytes())
    }
}

impl PartialOrd for Pattern {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern({})", self.text())
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

impl Serialize for Pattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.text())
    }
}

impl<'de> Deserialize<'de> for Pattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Pattern::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Lays a word out in the given direction as a trimmed pattern.
pub fn word_to_pattern(word: &[u8], direction: Direction) -> Result<Pattern> {
    if word.is_empty() {
        return Err(Error::Invalid("empty word".into()));
    }
    let len = word.len();
    let (rows, cols) = match direction {
        Direction::E | Direction::W => (1, len),
        Direction::S | Direction::N => (len, 1),
        _ => (len, len),
    };
    let mut cells = vec![WILDCARD; rows * cols];
    for (i, &letter) in word.iter().enumerate() {
        if letter == WILDCARD {
            return Err(Error::Invalid("words cannot contain wildcards".into()));
        }
        let (r, c) = direction.cell(i, len);
        cells[r * cols + c] = letter;
    }
    Ok(Pattern::untrimmed(rows, cols, cells))
}

/// Trims a pattern; see [`Pattern::trim`].
pub fn trim(pattern: Pattern) -> Result<Pattern> {
    pattern.trim()
}

/// All 1-based top-left positions where the pattern occurs, row-major.
pub fn occurrences(pattern: &Pattern, grid: &Grid) -> Vec<(usize, usize)> {
    if pattern.rows() > grid.rows() || pattern.cols() > grid.cols() {
        return Vec::new();
    }
    let mut found = Vec::new();
    for r in 0..=grid.rows() - pattern.rows() {
        for c in 0..=grid.cols() - pattern.cols() {
            if pattern.matches_at(grid, r, c) {
                found.push((r + 1, c + 1));
            }
        }
    }
    found
}

/// True when every letter lies on one of two adjacent `row - col` diagonals.
pub fn two_diagonal_support(pattern: &Pattern) -> bool {
    spread(pattern.concrete_cells().map(|(r, c, _)| r as i64 - c as i64)) <= 1
}

/// Same as [`two_diagonal_support`] for anti-diagonals (`row + col`).
pub fn two_antidiagonal_support(pattern: &Pattern) -> bool {
    spread(pattern.concrete_cells().map(|(r, c, _)| (r + c) as i64)) <= 1
}

fn spread(values: impl Iterator<Item = i64>) -> i64 {
    let (lo, hi) = values.fold((i64::MAX, i64::MIN), |(lo, hi), v| (lo.min(v), hi.max(v)));
    hi - lo
}
