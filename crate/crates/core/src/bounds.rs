//! Closed-form upper bounds on the latest first-appearance level.
//!
//! Everything is exact integer arithmetic; `ceil_log` never goes through
//! floating point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundInput {
    pub b: u64,
    pub n: u64,
    pub len: u64,
}

impl BoundInput {
    pub fn new(b: u64, n: u64, len: u64) -> Result<Self> {
        if b < 2 || n < 1 || len < 1 {
            return Err(Error::Invalid(format!(
                "bounds need b >= 2, n >= 1, len >= 1 (got b={b}, n={n}, len={len})"
            )));
        }
        Ok(Self { b, n, len })
    }
}

/// Smallest `e` with `base^e >= x`, for `x >= 1`.
pub fn ceil_log(base: u64, x: u64) -> u64 {
    debug_assert!(base >= 2 && x >= 1);
    let mut e = 0;
    let mut power: u128 = 1;
    while power < x as u128 {
        power *= base as u128;
        e += 1;
    }
    e
}

/// Bound for one-dimensional words and for horizontal or vertical words in
/// two dimensions.
pub fn w1(b: u64, n: u64, len: u64) -> u64 {
    match len {
        1 => n,
        _ => ceil_log(b, b * len - b) + n * n,
    }
}

/// Bound for diagonal words in two dimensions.
///
/// The two-letter case is `2n² + 1`, the two-letter diagonal bound, not the
/// `n² + 1` of the one-dimensional case.
pub fn w2(b: u64, n: u64, len: u64) -> u64 {
    match len {
        1 => n,
        2 => 2 * n * n + 1,
        _ => ceil_log(b, b * len - b) + n * n + n * n * n,
    }
}

/// Longest side a parent can have when the child side is `len`.
pub fn max_parent_len(len: u64, b: u64) -> u64 {
    (len + b - 1).div_ceil(b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmallCaseBounds {
    pub one_letter: u64,
    pub two_letter_1d: u64,
    pub two_letter_diag: u64,
    pub box_2x2: u64,
}

pub fn small_case_bounds(n: u64) -> SmallCaseBounds {
    SmallCaseBounds {
        one_letter: n,
        two_letter_1d: n * n + 1,
        two_letter_diag: 2 * n * n + 1,
        box_2x2: n * n * n + n * n + 1,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRow {
    pub b: u64,
    pub n: u64,
    pub len: u64,
    pub w1: u64,
    pub w2: u64,
    pub max_parent_len: u64,
}

pub fn bound_table(b: u64, n: u64, lens: impl IntoIterator<Item = u64>) -> Result<Vec<BoundRow>> {
    lens.into_iter()
        .map(|len| {
            let input = BoundInput::new(b, n, len)?;
            Ok(BoundRow {
                b,
                n,
                len,
                w1: w1(input.b, input.n, input.len),
                w2: w2(input.b, input.n, input.len),
                max_parent_len: max_parent_len(len, b),
            })
        })
        .collect()
}
