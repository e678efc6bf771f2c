//! Cell addresses on levels far too large to materialize.
//!
//! A cell on level `k` is identified by the level-1 cell it descends from and
//! the `k - 1` sub-cell choices made on the way down (its digit path). The
//! plain coordinate form is available for any unsigned integer type, so
//! shallow levels can use `u64` while deep ones go through `BigUint`.

use std::fmt::Debug;

use num_integer::Integer;
use num_traits::{FromPrimitive, ToPrimitive, Unsigned};
use serde::{Deserialize, Serialize};

use super::{BlockShape, Grid, RuleSet};
use crate::error::{Error, Result};

/// Unsigned integer type usable for absolute coordinates.
pub trait Coord: Clone + Debug + Integer + Unsigned + FromPrimitive + ToPrimitive {}

impl<T: Clone + Debug + Integer + Unsigned + FromPrimitive + ToPrimitive> Coord for T {}

/// Position of a cell inside its parent's replacement block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Digit {
    pub row: u8,
    pub col: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CellAddress {
    pub level: u32,
    /// 1-based level-1 ancestor cell.
    pub l1_row: usize,
    pub l1_col: usize,
    /// Sub-cell choices from level 2 down to `level`.
    pub path: Vec<Digit>,
}

impl CellAddress {
    pub fn l1(row: usize, col: usize) -> Self {
        Self {
            level: 1,
            l1_row: row,
            l1_col: col,
            path: Vec::new(),
        }
    }

    pub fn child(&self, digit: Digit) -> Self {
        let mut path = self.path.clone();
        path.push(digit);
        Self {
            level: self.level + 1,
            l1_row: self.l1_row,
            l1_col: self.l1_col,
            path,
        }
    }

    /// Converts 1-based absolute coordinates on `level` to digit-path form.
    pub fn from_coords<T: Coord>(level: u32, row: &T, col: &T, shape: BlockShape) -> Result<Self> {
        if level == 0 {
            return Err(Error::OutOfRange("levels start at 1".into()));
        }
        if row.is_zero() || col.is_zero() {
            return Err(Error::OutOfRange("coordinates are 1-based".into()));
        }
        let steps = (level - 1) as usize;
        let (l1_row, row_digits) = split_digits(row.clone() - T::one(), shape.rows, steps)?;
        let (l1_col, col_digits) = split_digits(col.clone() - T::one(), shape.cols, steps)?;
        let path = row_digits
            .into_iter()
            .zip(col_digits)
            .map(|(row, col)| Digit { row, col })
            .collect();
        Ok(Self {
            level,
            l1_row: l1_row + 1,
            l1_col: l1_col + 1,
            path,
        })
    }

    pub fn row<T: Coord>(&self, shape: BlockShape) -> T {
        join_digits(self.l1_row - 1, self.path.iter().map(|d| d.row), shape.rows)
    }

    pub fn col<T: Coord>(&self, shape: BlockShape) -> T {
        join_digits(self.l1_col - 1, self.path.iter().map(|d| d.col), shape.cols)
    }

    /// Shifts the address by a small non-negative offset on the same level.
    pub fn offset<T: Coord>(&self, rows: usize, cols: usize, shape: BlockShape) -> Result<Self> {
        let row = self.row::<T>(shape) + from_usize::<T>(rows);
        let col = self.col::<T>(shape) + from_usize::<T>(cols);
        Self::from_coords(self.level, &row, &col, shape)
    }
}

fn from_usize<T: Coord>(v: usize) -> T {
    T::from_usize(v).expect("coordinate type holds small values")
}

fn split_digits<T: Coord>(mut zero_based: T, base: usize, steps: usize) -> Result<(usize, Vec<u8>)> {
    let base_t = from_usize::<T>(base);
    let mut digits = vec![0u8; steps];
    for slot in digits.iter_mut().rev() {
        let (q, r) = zero_based.div_rem(&base_t);
        *slot = r.to_u8().expect("remainder below block side");
        zero_based = q;
    }
    let top = zero_based
        .to_usize()
        .ok_or_else(|| Error::OutOfRange(format!("coordinate lies beyond any level-1 cell: {zero_based:?}")))?;
    Ok((top, digits))
}

fn join_digits<T: Coord>(top: usize, digits: impl Iterator<Item = u8>, base: usize) -> T {
    let base_t = from_usize::<T>(base);
    let mut acc = from_usize::<T>(top);
    for d in digits {
        acc = acc * base_t.clone() + T::from_u8(d).expect("digit fits");
    }
    acc + T::one()
}

/// Inclusive, 1-based coordinate ranges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRange<T> {
    pub row_start: T,
    pub row_end: T,
    pub col_start: T,
    pub col_end: T,
}

/// Rows and columns covered on `level` by the descendants of one level-1 cell.
pub fn descendant_block_range<T: Coord>(l1_row: usize, l1_col: usize, level: u32, shape: BlockShape) -> BlockRange<T> {
    let side = |base: usize| num_traits::pow(from_usize::<T>(base), (level - 1) as usize);
    let span = |cell: usize, base: usize| {
        let s = side(base);
        let end = from_usize::<T>(cell) * s.clone();
        (end.clone() - s + T::one(), end)
    };
    let (row_start, row_end) = span(l1_row, shape.rows);
    let (col_start, col_end) = span(l1_col, shape.cols);
    BlockRange {
        row_start,
        row_end,
        col_start,
        col_end,
    }
}

/// Resolves one cell of any level by walking its digit path from level 1.
pub fn letter_at(l1: &Grid, rules: &RuleSet, addr: &CellAddress) -> Result<u8> {
    let shape = rules.block_shape();
    if addr.level == 0 || addr.path.len() != (addr.level - 1) as usize {
        return Err(Error::OutOfRange(format!(
            "digit path of length {} does not reach level {}",
            addr.path.len(),
            addr.level
        )));
    }
    if !(1..=l1.rows()).contains(&addr.l1_row) || !(1..=l1.cols()).contains(&addr.l1_col) {
        return Err(Error::OutOfRange(format!(
            "level-1 cell ({}, {}) is outside the {}x{} grid",
            addr.l1_row,
            addr.l1_col,
            l1.rows(),
            l1.cols()
        )));
    }
    let mut letter = l1.get(addr.l1_row - 1, addr.l1_col - 1);
    for d in &addr.path {
        let (r, c) = (d.row as usize, d.col as usize);
        if r >= shape.rows || c >= shape.cols {
            return Err(Error::OutOfRange(format!("digit {d:?} exceeds the block shape")));
        }
        let block = rules.block(letter).ok_or(Error::UnknownLetter {
            letter: letter as char,
        })?;
        letter = block[r * shape.cols + c];
    }
    Ok(letter)
}

#[cfg(test)]
mod tests {
    use num_bigint::BigUint;

    use super::*;
    use crate::substitution::expand;

    const SQUARE2: BlockShape = BlockShape { rows: 2, cols: 2 };

    #[test]
    fn block_ranges() {
        let r: BlockRange<u64> = descendant_block_range(1, 1, 2, SQUARE2);
        assert_eq!((r.row_start, r.row_end, r.col_start, r.col_end), (1, 2, 1, 2));
        let r: BlockRange<u64> = descendant_block_range(2, 3, 3, SQUARE2);
        assert_eq!((r.row_start, r.row_end, r.col_start, r.col_end), (5, 8, 9, 12));
    }

    #[test]
    fn deep_block_range_uses_big_integers() {
        let r: BlockRange<BigUint> = descendant_block_range(9, 12, 167, SQUARE2);
        let p = BigUint::from(2u8).pow(166);
        assert_eq!(r.row_start, BigUint::from(8u8) * &p + 1u8);
        assert_eq!(r.row_end, BigUint::from(9u8) * &p);
        assert_eq!(r.col_start, BigUint::from(11u8) * &p + 1u8);
        assert_eq!(r.col_end, BigUint::from(12u8) * &p);
    }

    #[test]
    fn coordinates_round_trip() {
        let addr = CellAddress::from_coords(4, &6u64, &13u64, SQUARE2).unwrap();
        assert_eq!((addr.l1_row, addr.l1_col), (1, 2));
        assert_eq!(addr.row::<u64>(SQUARE2), 6);
        assert_eq!(addr.col::<u64>(SQUARE2), 13);
        let big: BigUint = addr.col(SQUARE2);
        assert_eq!(big, BigUint::from(13u8));
    }

    #[test]
    fn letter_at_matches_example() {
        let rules = RuleSet::from_rules(&[('A', "AB"), ('B', "AC"), ('C', "BB")]).unwrap();
        let l1 = Grid::parse("A", 1).unwrap();
        let shape = rules.block_shape();
        let addr = CellAddress::from_coords(4, &1u32, &5u32, shape).unwrap();
        assert_eq!(letter_at(&l1, &rules, &addr).unwrap(), b'A');
        let l4 = expand(&l1, &rules, 3).unwrap();
        for col in 1..=8u32 {
            let addr = CellAddress::from_coords(4, &1u32, &col, shape).unwrap();
            assert_eq!(letter_at(&l1, &rules, &addr).unwrap(), l4.get(0, col as usize - 1));
        }
    }

    #[test]
    fn letter_at_level_one_is_identity() {
        let rules = RuleSet::from_rules(&[('A', "AB/BA"), ('B', "BB/AA")]).unwrap();
        let l1 = Grid::parse("AB/BB", 1).unwrap();
        for r in 1..=2 {
            for c in 1..=2 {
                let got = letter_at(&l1, &rules, &CellAddress::l1(r, c)).unwrap();
                assert_eq!(got, l1.get(r - 1, c - 1));
            }
        }
    }

    #[test]
    fn out_of_range_addresses() {
        let rules = RuleSet::from_rules(&[('A', "AB"), ('B', "AC"), ('C', "BB")]).unwrap();
        let l1 = Grid::parse("A", 1).unwrap();
        let addr = CellAddress::from_coords(3, &1u32, &5u32, rules.block_shape()).unwrap();
        assert!(matches!(letter_at(&l1, &rules, &addr), Err(Error::OutOfRange(_))));
        assert!(CellAddress::from_coords(3, &0u32, &1u32, rules.block_shape()).is_err());
        let mut bad = CellAddress::l1(1, 1);
        bad.level = 3;
        assert!(letter_at(&l1, &rules, &bad).is_err());
    }
}
