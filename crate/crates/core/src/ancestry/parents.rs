use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::Pattern;
use crate::substitution::{Digit, RuleSet, WILDCARD};

pub const DEFAULT_PRODUCT_CAP: u64 = 1_000_000;

/// A parent pattern together with the position of the child's top-left cell
/// inside the parent's top-left replacement block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parent {
    pub pattern: Pattern,
    pub offset: Digit,
}

/// Every pattern one level up whose expansion can contain `pattern`.
///
/// For each alignment of the child inside a grid of parent blocks, each
/// parent cell may hold any letter whose block agrees with the child letters
/// it covers; parent cells that cover only wildcards stay wildcards. The
/// result is the union of the per-alignment Cartesian products, sorted by
/// pattern text. A pattern reachable from several alignments keeps the
/// first one.
pub fn enumerate_parents(pattern: &Pattern, rules: &RuleSet, product_cap: u64) -> Result<Vec<Parent>> {
    let shape = rules.block_shape();
    let alphabet = rules.alphabet().letters();
    let mut plans = Vec::new();
    let mut total: u128 = 0;

    for dr in 0..shape.rows {
        'offset: for dc in 0..shape.cols {
            let prows = (dr + pattern.rows()).div_ceil(shape.rows);
            let pcols = (dc + pattern.cols()).div_ceil(shape.cols);
            let mut choices: Vec<Vec<u8>> = Vec::with_capacity(prows * pcols);
            let mut constraints: Vec<(usize, u8)> = Vec::with_capacity(shape.rows * shape.cols);
            for pr in 0..prows {
                for pc in 0..pcols {
                    constraints.clear();
                    for i in 0..shape.rows {
                        let Some(cr) = (pr * shape.rows + i).checked_sub(dr) else { continue };
                        if cr >= pattern.rows() {
                            continue;
                        }
                        for j in 0..shape.cols {
                            let Some(cc) = (pc * shape.cols + j).checked_sub(dc) else { continue };
                            if cc >= pattern.cols() {
                                continue;
                            }
                            let letter = pattern.get(cr, cc);
                            if letter != WILDCARD {
                                constraints.push((i * shape.cols + j, letter));
                            }
                        }
                    }
                    if constraints.is_empty() {
                        choices.push(vec![WILDCARD]);
                        continue;
                    }
                    let fits: Vec<u8> = alphabet
                        .iter()
                        .enumerate()
                        .filter(|&(k, _)| {
                            let block = rules.block_at(k);
                            constraints.iter().all(|&(pos, letter)| block[pos] == letter)
                        })
                        .map(|(_, &l)| l)
                        .collect();
                    if fits.is_empty() {
                        continue 'offset;
                    }
                    choices.push(fits);
                }
            }
            let size = choices.iter().fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128));
            total = total.saturating_add(size);
            if total > product_cap as u128 {
                return Err(Error::ResourceLimit {
                    what: "parent candidates",
                    requested: total,
                    cap: product_cap as u128,
                });
            }
            plans.push((
                Digit {
                    row: dr as u8,
                    col: dc as u8,
                },
                prows,
                pcols,
                choices,
            ));
        }
    }

    let mut seen: HashMap<Pattern, Digit> = HashMap::new();
    let mut order: Vec<Pattern> = Vec::new();
    for (offset, prows, pcols, choices) in plans {
        let mut pick = vec![0usize; choices.len()];
        loop {
            let cells: Vec<u8> = choices.iter().zip(&pick).map(|(c, &i)| c[i]).collect();
            let parent = Pattern::from_trimmed(prows, pcols, cells);
            if !seen.contains_key(&parent) {
                seen.insert(parent.clone(), offset);
                order.push(parent);
            }
            // odometer over the candidate lists, last cell fastest
            let mut k = choices.len();
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                pick[k] += 1;
                if pick[k] < choices[k].len() {
                    break;
                }
                pick[k] = 0;
            }
            if pick.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    order.sort();
    Ok(order
        .into_iter()
        .map(|pattern| {
            let offset = seen[&pattern];
            Parent { pattern, offset }
        })
        .collect())
}
