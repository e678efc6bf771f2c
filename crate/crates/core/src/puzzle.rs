//! The fractal word-search puzzle: find every listed word on its earliest
//! level, cross out the level-1 letters they descend from, and read what is
//! left.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ancestry::{
    all_grounded_cells, search_pattern, word_addresses, Bounded, Found, SearchLimits, SearchStats,
};
use crate::error::{Error, Result};
use crate::format::{key_value, parse_alphabet, parse_grid, sections, Section};
use crate::pattern::{word_to_pattern, Direction, Pattern};
use crate::substitution::{contract, descendant_block_range, letter_at, CellAddress, Grid, RuleSet};

/// Order in which directions win ties on the same level.
pub const DIRECTION_PRIORITY: [Direction; 8] = [
    Direction::E,
    Direction::S,
    Direction::SE,
    Direction::W,
    Direction::N,
    Direction::NW,
    Direction::NE,
    Direction::SW,
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PuzzleSpec {
    pub rules: RuleSet,
    /// Grid as printed, with its level tag.
    pub given_grid: Grid,
    /// The printed grid contracted down to level 1.
    pub l1: Grid,
    /// List entries as written, spaces and punctuation included.
    pub words: Vec<String>,
    pub directions: Vec<Direction>,
    pub answer_length: usize,
    /// Letter that occurs once on level 1 and marks where the answer hides.
    pub marker: u8,
}

impl PuzzleSpec {
    pub fn normalized_words(&self) -> Vec<String> {
        self.words
            .iter()
            .map(|w| normalize_word(w).expect("validated when the puzzle was loaded"))
            .collect()
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Uppercases and drops everything that is not an ASCII letter.
pub fn normalize_word(raw: &str) -> Result<String> {
    let word: String = raw
        .chars()
        .filter(char::is_ascii_alphabetic)
        .map(|c| c.to_ascii_uppercase())
        .collect();
    if word.is_empty() {
        return Err(Error::Invalid(format!("list entry {raw:?} has no letters")));
    }
    Ok(word)
}

pub fn load_puzzle(path: impl AsRef<Path>) -> Result<PuzzleSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    parse_puzzle(&text)
}

pub fn parse_puzzle(text: &str) -> Result<PuzzleSpec> {
    let sections = sections(text)?;
    let find = |name: &str| sections.iter().find(|s| s.name == name);
    for section in &sections {
        if !["alphabet", "grid", "words", "answer", "directions"].contains(&section.name.as_str()) {
            return Err(parse_err(section.line, format!("unknown section [{}]", section.name)));
        }
    }
    let alphabet = find("alphabet").ok_or_else(|| parse_err(1, "missing [alphabet] section"))?;
    let rules = parse_alphabet(alphabet)?;
    let grid_section = find("grid").ok_or_else(|| parse_err(1, "missing [grid] section"))?;
    let given_grid = parse_grid(grid_section, &rules)?;
    let l1 = contract_to_level_one(&given_grid, &rules, grid_section)?;

    let words_section = find("words").ok_or_else(|| parse_err(1, "missing [words] section"))?;
    let mut words = Vec::new();
    for &(line_no, raw) in &words_section.lines {
        let word = normalize_word(raw).map_err(|e| parse_err(line_no, e.to_string()))?;
        if let Some(bad) = word.bytes().find(|&c| !rules.alphabet().contains(c)) {
            return Err(parse_err(line_no, format!("letter {:?} is not in the alphabet", bad as char)));
        }
        words.push(raw.to_string());
    }
    if words.is_empty() {
        return Err(parse_err(words_section.line, "[words] is empty"));
    }

    let directions = match find("directions") {
        None => Direction::ALL.to_vec(),
        Some(section) => parse_directions(section)?,
    };

    let (answer_length, marker) = match find("answer") {
        None => (0, b'X'),
        Some(section) => {
            let (length, marker) = parse_answer(section)?;
            if !rules.alphabet().contains(marker) {
                return Err(parse_err(section.line, format!("marker {:?} is not in the alphabet", marker as char)));
            }
            (length, marker)
        }
    };

    Ok(PuzzleSpec {
        rules,
        given_grid,
        l1,
        words,
        directions,
        answer_length,
        marker,
    })
}

fn contract_to_level_one(grid: &Grid, rules: &RuleSet, section: &Section<'_>) -> Result<Grid> {
    let row_lines: Vec<usize> = section
        .lines
        .iter()
        .filter(|(_, line)| !line.contains('='))
        .map(|&(n, _)| n)
        .collect();
    let shape = rules.block_shape();
    let mut current = grid.clone();
    let mut block_rows = 1usize;
    while current.level() > 1 {
        block_rows *= shape.rows;
        current = contract(&current, rules).map_err(|e| match e {
            Error::NotContractible { row, col } => {
                let line = row_lines[(row - 1) * block_rows];
                parse_err(
                    line,
                    format!("grid block at row {row}, col {col} of level {} matches no rule", current.level() - 1),
                )
            }
            other => parse_err(section.line, other.to_string()),
        })?;
    }
    Ok(current)
}

fn parse_directions(section: &Section<'_>) -> Result<Vec<Direction>> {
    let mut out = Vec::new();
    for &(line_no, line) in &section.lines {
        for item in line.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let dir: Direction = item.parse().map_err(|_| parse_err(line_no, format!("unknown direction {item:?}")))?;
            if !out.contains(&dir) {
                out.push(dir);
            }
        }
    }
    if out.is_empty() {
        return Err(parse_err(section.line, "[directions] lists no directions"));
    }
    Ok(out)
}

fn parse_answer(section: &Section<'_>) -> Result<(usize, u8)> {
    let (mut length, mut marker) = (0, b'X');
    for &(line_no, line) in &section.lines {
        let (key, value) = key_value(line_no, line)?;
        match key {
            "length" => length = value.parse().map_err(|_| parse_err(line_no, format!("bad length {value:?}")))?,
            "marker" => match value.as_bytes() {
                [c] => marker = c.to_ascii_uppercase(),
                _ => return Err(parse_err(line_no, format!("marker must be one letter, got {value:?}"))),
            },
            other => return Err(parse_err(line_no, format!("unknown answer setting {other:?}"))),
        }
    }
    Ok((length, marker))
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub limits: SearchLimits,
    /// Cross out every occurrence on a word's earliest level instead of the
    /// chosen witness only.
    pub cross_all: bool,
    /// Half the side of the square window read around the marker's block.
    pub window_radius: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            limits: SearchLimits::default(),
            cross_all: false,
            window_radius: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub raw: String,
    pub word: String,
    pub direction: Direction,
    pub level: u32,
    pub ancestor: Pattern,
    /// 1-based level-1 position of the ancestor's top-left cell.
    pub anchor: (usize, usize),
    pub offsets: Vec<crate::substitution::Digit>,
    /// One address per letter, in reading order.
    pub addresses: Vec<CellAddress>,
    pub stats: SearchStats,
}

/// Finds the earliest level and best direction for one word.
pub fn place_word(raw: &str, spec: &PuzzleSpec, limits: SearchLimits) -> Result<Placement> {
    let word = normalize_word(raw)?;
    let mut best: Option<(Direction, Found)> = None;
    let mut stats = SearchStats::default();
    let mut capped = None;
    for dir in DIRECTION_PRIORITY.into_iter().filter(|d| spec.directions.contains(d)) {
        // A later direction only wins with a strictly earlier level.
        let cap = match &best {
            Some((_, f)) if f.level <= 1 => break,
            Some((_, f)) => Some(f.level - 2),
            None => None,
        };
        let cap = match (cap, limits.depth_cap) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let target = word_to_pattern(word.as_bytes(), dir)?;
        let (bounded, run) = search_pattern(target, &spec.l1, &spec.rules, SearchLimits { depth_cap: cap, ..limits })?;
        stats.nodes_expanded += run.nodes_expanded;
        stats.patterns_memoized += run.patterns_memoized;
        stats.depth_reached = stats.depth_reached.max(run.depth_reached);
        match bounded {
            Bounded::Found(found) => best = Some((dir, found)),
            Bounded::Never => {}
            Bounded::Capped => {
                if best.is_none() {
                    capped = Some(run.depth_reached);
                }
            }
        }
    }
    let Some((direction, found)) = best else {
        return Err(match capped {
            Some(depth) => Error::Unresolved { depth, stats },
            None => Error::NeverAppears { word },
        });
    };
    let addresses = word_addresses(&found, direction, &spec.l1, &spec.rules)?;
    Ok(Placement {
        raw: raw.to_string(),
        word,
        direction,
        level: found.level,
        ancestor: found.ancestor,
        anchor: found.anchor,
        offsets: found.offsets,
        addresses,
        stats,
    })
}

/// Level-1 cells whose descendants hold a letter of some placed word.
pub fn crossed_out_l1_cells(placements: &[Placement]) -> BTreeSet<(usize, usize)> {
    placements
        .iter()
        .flat_map(|p| p.addresses.iter().map(|a| (a.l1_row, a.l1_col)))
        .collect()
}

/// Letters of `l1` outside `crossed`, row-major.
pub fn uncrossed_letters(l1: &Grid, crossed: &BTreeSet<(usize, usize)>) -> String {
    let mut out = String::new();
    for r in 0..l1.rows() {
        for c in 0..l1.cols() {
            if !crossed.contains(&(r + 1, c + 1)) {
                out.push(l1.get(r, c) as char);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct XShape {
    /// 0-based position of the 4x4 square inside the window.
    pub row: usize,
    pub col: usize,
    /// Top-left to bottom-right.
    pub main_diagonal: String,
    /// Bottom-left to top-right.
    pub anti_diagonal: String,
    pub answer: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerWindow {
    pub level: u32,
    /// 1-based level-1 cell holding the marker.
    pub marker_cell: (usize, usize),
    /// 1-based coordinates of the window's top-left cell on `level`.
    pub top: BigUint,
    pub left: BigUint,
    pub rows: Vec<String>,
    pub x_shape: Option<XShape>,
}

impl AnswerWindow {
    /// Absolute address of window cell `(i, j)`, 0-based.
    pub fn address(&self, i: usize, j: usize, rules: &RuleSet) -> Result<CellAddress> {
        CellAddress::from_coords(
            self.level,
            &(self.top.clone() + BigUint::from(i)),
            &(self.left.clone() + BigUint::from(j)),
            rules.block_shape(),
        )
    }
}

/// Reads the square window of side `2 * radius` centred on the block that the
/// marker cell grows into on `level`, then looks for the X inside it.
pub fn answer_window(spec: &PuzzleSpec, level: u32, radius: usize) -> Result<AnswerWindow> {
    if level == 0 || radius == 0 {
        return Err(Error::Invalid("level and window radius must be positive".into()));
    }
    let marker_cells: Vec<(usize, usize)> = (0..spec.l1.rows())
        .flat_map(|r| (0..spec.l1.cols()).map(move |c| (r, c)))
        .filter(|&(r, c)| spec.l1.get(r, c) == spec.marker)
        .map(|(r, c)| (r + 1, c + 1))
        .collect();
    let [marker_cell] = marker_cells[..] else {
        return Err(Error::Invalid(format!(
            "marker {:?} occurs {} times on level 1, expected once",
            spec.marker as char,
            marker_cells.len()
        )));
    };
    let shape = spec.rules.block_shape();
    let range = descendant_block_range::<BigUint>(marker_cell.0, marker_cell.1, level, shape);
    let total_rows = BigUint::from(spec.l1.rows()) * num_traits::pow(BigUint::from(shape.rows), (level - 1) as usize);
    let total_cols = BigUint::from(spec.l1.cols()) * num_traits::pow(BigUint::from(shape.cols), (level - 1) as usize);
    let (top, height, mid_row) = window_span(&range.row_start, &range.row_end, &total_rows, radius);
    let (left, width, mid_col) = window_span(&range.col_start, &range.col_end, &total_cols, radius);
    let mut rows = Vec::with_capacity(height);
    for i in 0..height {
        let mut row = String::with_capacity(width);
        for j in 0..width {
            let addr = CellAddress::from_coords(level, &(top.clone() + BigUint::from(i)), &(left.clone() + BigUint::from(j)), shape)?;
            row.push(letter_at(&spec.l1, &spec.rules, &addr)? as char);
        }
        rows.push(row);
    }
    // Every cell holds a letter, so any square has letters on its diagonals;
    // the X is the one sharing the block's centre.
    let side = spec.answer_length / 2;
    let x_shape = if spec.answer_length.is_multiple_of(2) && mid_row + 1 >= side / 2 && mid_col + 1 >= side / 2 {
        read_x(&rows, mid_row + 1 - side / 2, mid_col + 1 - side / 2, side)
    } else {
        None
    };
    Ok(AnswerWindow {
        level,
        marker_cell,
        top,
        left,
        rows,
        x_shape,
    })
}

/// Start and length of a window of `2 * radius` cells around the middle of
/// `[start, end]`, clipped to `[1, total]`, plus the window index of the
/// middle cell.
fn window_span(start: &BigUint, end: &BigUint, total: &BigUint, radius: usize) -> (BigUint, usize, usize) {
    // upper-left of the (one or two) middle cells
    let middle = start + (end - start) / 2u32;
    let radius_big = BigUint::from(radius);
    let lo = if middle > radius_big { &middle + 1u32 - &radius_big } else { BigUint::one() };
    let hi = (&middle + &radius_big).min(total.clone());
    let len = (hi - &lo + 1u32).try_into().expect("window side fits in usize");
    let mid = (&middle - &lo).try_into().expect("window side fits in usize");
    (lo, len, mid)
}

/// Reads the X on the square of side `side` whose top-left window cell is
/// `(row, col)`: the main diagonal top-left to bottom-right, then the
/// anti-diagonal bottom-left to top-right.
fn read_x(rows: &[String], row: usize, col: usize, side: usize) -> Option<XShape> {
    let grid: Vec<&[u8]> = rows.iter().map(|r| r.as_bytes()).collect();
    if side == 0 || row + side > grid.len() || grid.iter().any(|r| col + side > r.len()) {
        return None;
    }
    let main_diagonal: String = (0..side).map(|i| grid[row + i][col + i] as char).collect();
    let anti_diagonal: String = (0..side).map(|i| grid[row + side - 1 - i][col + i] as char).collect();
    Some(XShape {
        row,
        col,
        answer: format!("{main_diagonal}{anti_diagonal}"),
        main_diagonal,
        anti_diagonal,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub placements: Vec<Placement>,
    pub level_counts: BTreeMap<u32, usize>,
    pub crossed_out: BTreeSet<(usize, usize)>,
    pub message: String,
    pub level_sum: u64,
    pub window: Option<AnswerWindow>,
    /// Why the window could not be read, if it could not.
    pub window_error: Option<String>,
}

impl SolveReport {
    pub fn answer(&self) -> Option<&str> {
        self.window.as_ref()?.x_shape.as_ref().map(|x| x.answer.as_str())
    }
}

pub fn solve(spec: &PuzzleSpec, options: SolveOptions) -> Result<SolveReport> {
    let placements: Vec<Placement> = spec
        .words
        .par_iter()
        .map(|raw| place_word(raw, spec, options.limits))
        .collect::<Result<_>>()?;
    let mut level_counts = BTreeMap::new();
    for p in &placements {
        *level_counts.entry(p.level).or_insert(0) += 1;
    }
    let mut crossed_out = crossed_out_l1_cells(&placements);
    if options.cross_all {
        let extra: Vec<Vec<(usize, usize)>> = placements
            .par_iter()
            .map(|p| every_occurrence_cells(p, spec, options.limits.product_cap))
            .collect::<Result<_>>()?;
        crossed_out.extend(extra.into_iter().flatten());
    }
    let message = uncrossed_letters(&spec.l1, &crossed_out);
    let level_sum: u64 = placements.iter().map(|p| u64::from(p.level)).sum();
    let (window, window_error) = match u32::try_from(level_sum)
        .map_err(|_| Error::Invalid("level sum too large".into()))
        .and_then(|level| answer_window(spec, level, options.window_radius))
    {
        Ok(w) => (Some(w), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(SolveReport {
        placements,
        level_counts,
        crossed_out,
        message,
        level_sum,
        window,
        window_error,
    })
}

fn every_occurrence_cells(p: &Placement, spec: &PuzzleSpec, product_cap: u64) -> Result<Vec<(usize, usize)>> {
    let mut cells = Vec::new();
    for dir in spec.directions.iter().copied() {
        let target = word_to_pattern(p.word.as_bytes(), dir)?;
        let (bounded, _) = search_pattern(
            target.clone(),
            &spec.l1,
            &spec.rules,
            SearchLimits {
                depth_cap: Some(p.level - 1),
                product_cap,
            },
        )?;
        if matches!(bounded, Bounded::Found(ref f) if f.level == p.level) {
            cells.extend(all_grounded_cells(target, p.level, &spec.l1, &spec.rules, product_cap)?);
        }
    }
    Ok(cells)
}
