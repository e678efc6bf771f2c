//! Line-oriented text formats for rule files and puzzle files.
//!
//! ```text
//! # comment
//! [alphabet]
//! A = AB/CB
//! B = AC/BB
//!
//! [grid]
//! level = 1
//! AB
//! BA
//! ```

use crate::error::{Error, Result};
use crate::substitution::{Grid, RuleSet};

pub(crate) struct Section<'a> {
    pub name: String,
    pub line: usize,
    pub lines: Vec<(usize, &'a str)>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Splits a file into `[name]` sections of non-empty, comment-free lines.
pub(crate) fn sections(text: &str) -> Result<Vec<Section<'_>>> {
    let mut out: Vec<Section<'_>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| parse_err(line_no, format!("malformed section header {line:?}")))?;
            let name = name.trim().to_ascii_lowercase();
            if out.iter().any(|s| s.name == name) {
                return Err(parse_err(line_no, format!("section [{name}] appears twice")));
            }
            out.push(Section {
                name,
                line: line_no,
                lines: Vec::new(),
            });
            continue;
        }
        match out.last_mut() {
            Some(section) => section.lines.push((line_no, line)),
            None => return Err(parse_err(line_no, "content before the first section header")),
        }
    }
    Ok(out)
}

pub(crate) fn key_value(line_no: usize, line: &str) -> Result<(&str, &str)> {
    let (key, value) = line
        .split_once('=')
        .ok_or_else(|| parse_err(line_no, format!("expected `key = value`, got {line:?}")))?;
    Ok((key.trim(), value.trim()))
}

pub(crate) fn parse_alphabet(section: &Section<'_>) -> Result<RuleSet> {
    let mut entries: Vec<(char, String)> = Vec::new();
    for &(line_no, line) in &section.lines {
        let (letter, rows) = key_value(line_no, line)?;
        let mut chars = letter.chars();
        let (Some(c), None) = (chars.next(), chars.next()) else {
            return Err(parse_err(line_no, format!("{letter:?} is not a single letter")));
        };
        if !c.is_ascii_alphanumeric() {
            return Err(parse_err(line_no, format!("{c:?} cannot be used as a letter")));
        }
        if entries.iter().any(|(l, _)| *l == c) {
            return Err(parse_err(line_no, format!("second rule for {c:?}")));
        }
        entries.push((c, rows.replace(' ', "")));
    }
    if entries.is_empty() {
        return Err(parse_err(section.line, "[alphabet] has no rules"));
    }
    let borrowed: Vec<(char, &str)> = entries.iter().map(|(c, r)| (*c, r.as_str())).collect();
    RuleSet::from_rules(&borrowed).map_err(|e| parse_err(section.line, e.to_string()))
}

pub(crate) fn parse_grid(section: &Section<'_>, rules: &RuleSet) -> Result<Grid> {
    let mut level = None;
    let mut rows: Vec<&str> = Vec::new();
    for &(line_no, line) in &section.lines {
        if line.contains('=') {
            let (key, value) = key_value(line_no, line)?;
            if key != "level" {
                return Err(parse_err(line_no, format!("unknown grid setting {key:?}")));
            }
            let k: u32 = value
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad level {value:?}")))?;
            if k == 0 {
                return Err(parse_err(line_no, "levels start at 1"));
            }
            level = Some(k);
            continue;
        }
        if let Some(first) = rows.first() {
            if first.len() != line.len() {
                return Err(parse_err(
                    line_no,
                    format!("row has {} letters, expected {}", line.len(), first.len()),
                ));
            }
        }
        if let Some(bad) = line.bytes().find(|&c| !rules.alphabet().contains(c)) {
            return Err(parse_err(line_no, format!("letter {:?} is not in the alphabet", bad as char)));
        }
        rows.push(line);
    }
    if rows.is_empty() {
        return Err(parse_err(section.line, "[grid] has no rows"));
    }
    Grid::from_rows(&rows, level.unwrap_or(1)).map_err(|e| parse_err(section.line, e.to_string()))
}

#[derive(Clone, Debug)]
pub struct RuleFile {
    pub rules: RuleSet,
    pub grid: Option<Grid>,
}

pub fn parse_rule_file(text: &str) -> Result<RuleFile> {
    let sections = sections(text)?;
    let alphabet = sections
        .iter()
        .find(|s| s.name == "alphabet")
        .ok_or_else(|| parse_err(1, "missing [alphabet] section"))?;
    let rules = parse_alphabet(alphabet)?;
    let mut grid = None;
    for section in &sections {
        match section.name.as_str() {
            "alphabet" => {}
            "grid" => grid = Some(parse_grid(section, &rules)?),
            other => return Err(parse_err(section.line, format!("unknown section [{other}]"))),
        }
    }
    Ok(RuleFile { rules, grid })
}

pub fn render_rules(rules: &RuleSet) -> String {
    let mut out = String::from("[alphabet]\n");
    for &letter in rules.alphabet().letters() {
        let text = rules.rule_text(letter).expect("letter is in the alphabet");
        out.push_str(&format!("{} = {}\n", letter as char, text));
    }
    out
}

pub fn render_grid(grid: &Grid) -> String {
    format!("[grid]\nlevel = {}\n{}", grid.level(), grid)
}
