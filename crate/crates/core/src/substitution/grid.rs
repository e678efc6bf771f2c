use std::fmt;

use crate::error::{Error, Result};

/// A concrete rectangle of letters tagged with the level it sits on.
///
/// Cells are stored row-major. Accessors take 0-based indices; addresses
/// shown to users are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grid {
    rows: usize,
    cols: usize,
    cells: Vec<u8>,
    level: u32,
}

impl Grid {
    pub fn new(rows: usize, cols: usize, cells: Vec<u8>, level: u32) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Invalid("grid must have at least one cell".into()));
        }
        if cells.len() != rows * cols {
            return Err(Error::Invalid(format!(
                "{} cells do not fill a {rows}x{cols} grid",
                cells.len()
            )));
        }
        if level == 0 {
            return Err(Error::Invalid("levels start at 1".into()));
        }
        Ok(Self {
            rows,
            cols,
            cells,
            level,
        })
    }

    pub fn from_rows<S: AsRef<str>>(rows: &[S], level: u32) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::Invalid("grid must have at least one row".into()));
        };
        let cols = first.as_ref().len();
        let mut cells = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::Invalid(format!(
                    "row {} has {} letters, expected {cols}",
                    i + 1,
                    row.len()
                )));
            }
            cells.extend_from_slice(row.as_bytes());
        }
        Self::new(rows.len(), cols, cells, level)
    }

    /// Parses rows joined by `/`, e.g. `AB/CD`.
    pub fn parse(text: &str, level: u32) -> Result<Self> {
        let rows: Vec<&str> = text.trim().split('/').map(str::trim).collect();
        Self::from_rows(&rows, level)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.cells[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.cells[row * self.cols..(row + 1) * self.cols]
    }

    pub fn row_strings(&self) -> Vec<String> {
        (0..self.rows)
            .map(|r| String::from_utf8_lossy(self.row(r)).into_owned())
            .collect()
    }

    /// Rows joined by `/`.
    pub fn to_text(&self) -> String {
        self.row_strings().join("/")
    }

    pub fn with_level(mut self, level: u32) -> Self {
        self.level = level;
        self
    }

    pub fn count(&self, letter: u8) -> usize {
        self.cells.iter().filter(|&&c| c == letter).count()
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            writeln!(f, "{}", String::from_utf8_lossy(self.row(r)))?;
        }
        Ok(())
    }
}
