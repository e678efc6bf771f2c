//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use fractal_core::ancestry::ancestor_depths;
use fractal_core::bounds::{max_parent_len, w1, w2};
use fractal_core::oracle::{latest_first_appearance, sweep_max_latest};
use fractal_core::pattern::{two_antidiagonal_support, two_diagonal_support};
use fractal_core::puzzle::{answer_window, load_puzzle, solve, SolveOptions};
use fractal_core::{
    contract, enumerate_parents, first_appearance, word_to_pattern, Dimension, Direction, Grid, Pattern, RuleSet,
    SearchLimits,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x05ee_df2a_c7a1;
const RANDOM_INSTANCES: usize = 1000;
const IDENTICAL_ROW_CASES: usize = 300;
const FORWARD_LEVELS: u32 = 10;
const MAX_WORD: usize = 4;
/// Sampled (word, direction) pairs per random instance: half drawn from what
/// the forward oracle saw, half uniformly at random.
const WORDS_PER_INSTANCE: usize = 24;

const FIGURE3_L1: [&str; 11] = [
    "LEVELONESSUPYPM",
    "EPATETATIMSAORQ",
    "SKFAICRDPCAWHWH",
    "CONKBAHEAUEHRUA",
    "IYMANDELBROTRDU",
    "NTRGIHIYLLARSES",
    "OLEIZNEAHIIZKVD",
    "TFHRGVWCVCLHHLO",
    "CHPSAELOAUUXTMR",
    "EBGWATRNREJAKPF",
    "TSQUARESSBPOCTF",
];

fn puzzle_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/in_the_details.puzzle")
}

type Outcome = Result<String, String>;

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    let detail = detail.into();
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, budget: Duration) -> Outcome {
    check(elapsed <= budget, format!("{elapsed:.2?} (budget {budget:?})"))
}

fn contraction_golden() -> Outcome {
    let start = Instant::now();
    let spec = load_puzzle(puzzle_path()).map_err(|e| e.to_string())?;
    let once = contract(&spec.given_grid, &spec.rules).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let rows = once.row_strings();
    check(rows == FIGURE3_L1, format!("contracted rows {rows:?}"))?;
    check(spec.given_grid.rows() == 22 && spec.given_grid.cols() == 30, "given grid is not 22x30")?;
    within(elapsed, Duration::from_secs(1))
}

fn word_levels() -> Outcome {
    let spec = load_puzzle(puzzle_path()).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let report = solve(&spec, SolveOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let level_of = |w: &str| report.placements.iter().find(|p| p.word == w).map(|p| (p.level, p.direction));
    let counts: Vec<(u32, usize)> = report.level_counts.iter().map(|(&l, &c)| (l, c)).collect();
    check(
        counts == [(1, 18), (2, 6), (3, 3), (4, 1), (6, 1), (15, 1), (17, 1), (86, 1)],
        format!("level counts {counts:?}"),
    )?;
    let horizontal = |d: Direction| matches!(d, Direction::E | Direction::W);
    match level_of("LEVYDRAGON") {
        Some((6, d)) if horizontal(d) => {}
        other => return Err(format!("LEVYDRAGON placed as {other:?}")),
    }
    for (word, level) in [("ESCAPE", 15), ("DIMENSION", 17)] {
        check(level_of(word).map(|p| p.0) == Some(level), format!("{word} placed as {:?}", level_of(word)))?;
    }
    match level_of("RAUZY") {
        Some((86, d)) if d.is_diagonal() => {}
        other => return Err(format!("RAUZY placed as {other:?}")),
    }
    let nodes: u64 = report.placements.iter().map(|p| p.stats.nodes_expanded).sum();
    within(elapsed, Duration::from_secs(600)).map(|t| format!("{t}, {nodes} patterns expanded"))
}

fn sum_and_answer() -> Outcome {
    let spec = load_puzzle(puzzle_path()).map_err(|e| e.to_string())?;
    let report = solve(&spec, SolveOptions::default()).map_err(|e| e.to_string())?;
    check(report.level_sum == 167, format!("level sum {}", report.level_sum))?;
    let start = Instant::now();
    let window = answer_window(&spec, 167, 4).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let grid = Grid::from_rows(&window.rows, 1).map_err(|e| e.to_string())?;
    let x = Pattern::parse("H**Y/*UE*/*RM*/H**P").map_err(|e| e.to_string())?;
    check(x.first_occurrence(&grid).is_some(), format!("window {:?} lacks the X", window.rows))?;
    let answer = window.x_shape.as_ref().map(|x| x.answer.as_str());
    check(answer == Some("HUMPHREY"), format!("answer {answer:?}"))?;
    within(elapsed, Duration::from_secs(1)).map(|t| format!("sum 167, HUMPHREY, window read in {t}"))
}

fn secret_message() -> Outcome {
    let spec = load_puzzle(puzzle_path()).map_err(|e| e.to_string())?;
    let report = solve(&spec, SolveOptions::default()).map_err(|e| e.to_string())?;
    check(
        report.message == "SUMEACHWORDSLEVELXMARKSSPOT",
        format!("uncrossed letters {:?}", report.message),
    )
}

fn footnote_sweeps() -> Outcome {
    let mut parts = Vec::new();
    for (n, want, budget) in [(2, 4, 10), (3, 7, 10), (4, 13, 1800)] {
        let start = Instant::now();
        let report =
            sweep_max_latest(n, 2, Dimension::One, 2, SearchLimits::default()).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        check(report.global_max == want, format!("n={n}: max {} (want {want})", report.global_max))?;
        within(elapsed, Duration::from_secs(budget)).map_err(|e| format!("n={n}: {e}"))?;
        parts.push(format!("n={n} -> {want} in {elapsed:.2?}"));
    }
    Ok(parts.join(", "))
}

const ALL_STEPS: [(Direction, isize, isize); 8] = [
    (Direction::E, 0, 1),
    (Direction::W, 0, -1),
    (Direction::S, 1, 0),
    (Direction::N, -1, 0),
    (Direction::SE, 1, 1),
    (Direction::NE, -1, 1),
    (Direction::SW, 1, -1),
    (Direction::NW, -1, -1),
];

/// Materializes every level and records, per direction and word, the first
/// level it is read on. Shares no code with the library.
struct ForwardOracle {
    n: usize,
    first: Vec<Vec<u32>>,
}

impl ForwardOracle {
    fn key(n: usize, word: &[usize]) -> usize {
        word.iter().fold(0, |acc, &x| acc * (n + 1) + x + 1)
    }

    fn build(blocks: &[Vec<usize>], block_rows: usize, b: usize, l1: &[Vec<usize>], levels: u32) -> Self {
        let n = blocks.len();
        let size = (n + 1).pow(MAX_WORD as u32 + 1);
        let mut first = vec![vec![0u32; size]; 8];
        let mut grid = l1.to_vec();
        for level in 1..=levels {
            if level > 1 {
                let mut next = vec![vec![0usize; grid[0].len() * b]; grid.len() * block_rows];
                for (r, row) in grid.iter().enumerate() {
                    for (c, &x) in row.iter().enumerate() {
                        for i in 0..block_rows {
                            for j in 0..b {
                                next[r * block_rows + i][c * b + j] = blocks[x][i * b + j];
                            }
                        }
                    }
                }
                grid = next;
            }
            let (rows, cols) = (grid.len() as isize, grid[0].len() as isize);
            for (d, &(_, dr, dc)) in ALL_STEPS.iter().enumerate() {
                for r in 0..rows {
                    for c in 0..cols {
                        let mut key = 0;
                        for k in 0..MAX_WORD as isize {
                            let (rr, cc) = (r + k * dr, c + k * dc);
                            if rr < 0 || rr >= rows || cc < 0 || cc >= cols {
                                break;
                            }
                            key = key * (n + 1) + grid[rr as usize][cc as usize] + 1;
                            if first[d][key] == 0 {
                                first[d][key] = level;
                            }
                        }
                    }
                }
            }
        }
        Self { n, first }
    }

    fn level(&self, dir: usize, word: &[usize]) -> Option<u32> {
        match self.first[dir][Self::key(self.n, word)] {
            0 => None,
            l => Some(l),
        }
    }

    fn seen(&self) -> Vec<(usize, Vec<usize>)> {
        let mut out = Vec::new();
        for (d, table) in self.first.iter().enumerate() {
            for (key, &level) in table.iter().enumerate() {
                if level > 0 {
                    let mut word = Vec::new();
                    let mut k = key;
                    while k > 0 {
                        word.push(k % (self.n + 1) - 1);
                        k /= self.n + 1;
                    }
                    word.reverse();
                    out.push((d, word));
                }
            }
        }
        out
    }
}

const LETTERS: &[u8] = b"ABCD";

struct Instance {
    rules: RuleSet,
    blocks: Vec<Vec<usize>>,
    block_rows: usize,
    l1: Grid,
    l1_idx: Vec<Vec<usize>>,
}

fn random_instance(rng: &mut ChaCha8Rng, two_d: bool) -> Instance {
    let n = rng.gen_range(1..=4);
    let b = 2;
    let block_rows = if two_d { b } else { 1 };
    let blocks: Vec<Vec<usize>> =
        (0..n).map(|_| (0..block_rows * b).map(|_| rng.gen_range(0..n)).collect()).collect();
    let texts: Vec<String> = blocks
        .iter()
        .map(|blk| {
            blk.chunks(b)
                .map(|row| row.iter().map(|&x| LETTERS[x] as char).collect::<String>())
                .collect::<Vec<_>>()
                .join("/")
        })
        .collect();
    let entries: Vec<(char, &str)> = texts.iter().enumerate().map(|(i, t)| (LETTERS[i] as char, t.as_str())).collect();
    let rules = RuleSet::from_rules(&entries).expect("random rules are well formed");
    let rows = if two_d { rng.gen_range(1..=4) } else { 1 };
    let cols = rng.gen_range(1..=4);
    let l1_idx: Vec<Vec<usize>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(0..n)).collect()).collect();
    let text: Vec<String> = l1_idx.iter().map(|r| r.iter().map(|&x| LETTERS[x] as char).collect()).collect();
    let l1 = Grid::from_rows(&text, 1).expect("random grid is well formed");
    Instance {
        rules,
        blocks,
        block_rows,
        l1,
        l1_idx,
    }
}

#[derive(Default)]
struct RandomTally {
    instances: usize,
    comparisons: usize,
    found: usize,
    never: usize,
    beyond: usize,
    mismatches: Vec<String>,
    bound_checks: usize,
    bound_violations: Vec<String>,
}

/// Criteria 6 and 7 share their instances.
fn random_instances() -> RandomTally {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut tally = RandomTally::default();
    for i in 0..RANDOM_INSTANCES {
        let two_d = i % 2 == 1;
        let inst = random_instance(&mut rng, two_d);
        let n = inst.rules.n();
        let oracle = ForwardOracle::build(&inst.blocks, inst.block_rows, 2, &inst.l1_idx, FORWARD_LEVELS);
        let seen = oracle.seen();
        let mut sample = Vec::new();
        for k in 0..WORDS_PER_INSTANCE {
            if k % 2 == 0 && !seen.is_empty() {
                sample.push(seen[rng.gen_range(0..seen.len())].clone());
            } else {
                let len = rng.gen_range(1..=MAX_WORD);
                sample.push((rng.gen_range(0..8), (0..len).map(|_| rng.gen_range(0..n)).collect()));
            }
        }
        tally.instances += 1;
        for (d, word) in sample {
            let dir = ALL_STEPS[d].0;
            let letters: Vec<u8> = word.iter().map(|&x| LETTERS[x]).collect();
            let text = String::from_utf8_lossy(&letters).into_owned();
            let backward = match first_appearance(&letters, dir, &inst.l1, &inst.rules, SearchLimits::default()) {
                Ok(r) => r.level(),
                Err(e) => {
                    tally.mismatches.push(format!("{text} {dir} on {}: {e}", inst.l1));
                    continue;
                }
            };
            let forward = oracle.level(d, &word);
            tally.comparisons += 1;
            let agrees = match backward {
                Some(l) if l <= FORWARD_LEVELS => forward == Some(l),
                _ => forward.is_none(),
            };
            match backward {
                Some(l) if l <= FORWARD_LEVELS => tally.found += 1,
                Some(_) => tally.beyond += 1,
                None => tally.never += 1,
            }
            if !agrees {
                tally.mismatches.push(format!(
                    "{text} {dir} rules {:?} l1 {}: backward {backward:?}, forward {forward:?}",
                    inst.rules.alphabet().letters().iter().map(|&c| inst.rules.rule_text(c).unwrap()).collect::<Vec<_>>(),
                    inst.l1
                ));
            }
            bound_checks(&mut tally, &inst, &letters, dir, backward, n as u64, two_d);
        }
    }
    tally
}

fn bound_checks(
    tally: &mut RandomTally,
    inst: &Instance,
    word: &[u8],
    dir: Direction,
    level: Option<u32>,
    n: u64,
    two_d: bool,
) {
    let len = word.len() as u64;
    let text = String::from_utf8_lossy(word);
    let diagonal = two_d && dir.is_diagonal();
    if let Some(level) = level {
        let bound = if diagonal { w2(2, n, len) } else { w1(2, n, len) };
        tally.bound_checks += 1;
        if u64::from(level) > bound {
            tally.bound_violations.push(format!("{text} {dir}: level {level} above bound {bound}"));
        }
    }
    let target = word_to_pattern(word, dir).expect("word is non-empty");
    let ancestors = match ancestor_depths(target, &inst.rules, SearchLimits::default()) {
        Ok(a) => a,
        Err(e) => {
            tally.bound_violations.push(format!("{text} {dir}: {e}"));
            return;
        }
    };
    for (pattern, _) in &ancestors {
        let parents = enumerate_parents(pattern, &inst.rules, SearchLimits::default().product_cap)
            .expect("ancestors were enumerated once already");
        for parent in parents {
            tally.bound_checks += 1;
            let p = &parent.pattern;
            if p.rows() as u64 > max_parent_len(pattern.rows() as u64, inst.block_rows as u64).max(1)
                || p.cols() as u64 > max_parent_len(pattern.cols() as u64, 2)
            {
                tally.bound_violations.push(format!("{pattern} has oversized parent {p}"));
            }
        }
        if diagonal && len >= 2 {
            tally.bound_checks += 1;
            let support = match dir {
                Direction::SE | Direction::NW => two_diagonal_support(pattern),
                _ => two_antidiagonal_support(pattern),
            };
            if !support || max_letters_in_2x2(pattern) > 3 {
                tally.bound_violations.push(format!("diagonal ancestor {pattern} of {text} {dir} spreads out"));
            }
        }
    }
}

fn max_letters_in_2x2(p: &Pattern) -> usize {
    let mut best = 0;
    for r in 0..p.rows() {
        for c in 0..p.cols() {
            let count = p
                .concrete_cells()
                .filter(|&(rr, cc, _)| (r..r + 2).contains(&rr) && (c..c + 2).contains(&cc))
                .count();
            best = best.max(count);
        }
    }
    best
}

fn identical_rows() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x1d);
    let mut violations = Vec::new();
    let mut compared = 0;
    for _ in 0..IDENTICAL_ROW_CASES {
        let inst = random_instance(&mut rng, false);
        let stacked = inst.rules.with_identical_rows().map_err(|e| e.to_string())?;
        let len = rng.gen_range(1..=MAX_WORD);
        let word: Vec<u8> = (0..len).map(|_| LETTERS[rng.gen_range(0..inst.rules.n())]).collect();
        let one = first_appearance(&word, Direction::E, &inst.l1, &inst.rules, SearchLimits::default())
            .map_err(|e| e.to_string())?;
        let two = first_appearance(&word, Direction::E, &inst.l1, &stacked, SearchLimits::default())
            .map_err(|e| e.to_string())?;
        compared += 1;
        if one.level() != two.level() {
            violations.push(format!("{} on {}: {:?} vs {:?}", String::from_utf8_lossy(&word), inst.l1, one.level(), two.level()));
        }
    }
    check(violations.is_empty(), format!("{compared} cases, violations {violations:?}"))
}

fn micro_examples() -> Outcome {
    let start = Instant::now();
    let ex1 = RuleSet::from_rules(&[('A', "AB"), ('B', "AC"), ('C', "BB")]).map_err(|e| e.to_string())?;
    let ex2 = RuleSet::from_rules(&[('A', "AB/CB"), ('B', "AC/BB"), ('C', "BB/CC")]).map_err(|e| e.to_string())?;
    let parents = |word: &str, rules: &RuleSet| -> Result<Vec<String>, String> {
        let p = word_to_pattern(word.as_bytes(), Direction::E).map_err(|e| e.to_string())?;
        let mut out: Vec<String> = enumerate_parents(&p, rules, 1_000_000)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|q| q.pattern.text())
            .collect();
        out.sort();
        Ok(out)
    };
    check(parents("CAB", &ex1)? == ["BA"], "CAB parents")?;
    check(parents("BA", &ex1)? == ["AA", "AB", "CA", "CB"], "BA parents")?;
    check(parents("CACABA", &ex1)? == ["BBAA", "BBAB"], "CACABA parents")?;
    let level = |word: &str, dir: Direction, l1: &str, rules: &RuleSet| -> Result<Option<u32>, String> {
        let grid = Grid::parse(l1, 1).map_err(|e| e.to_string())?;
        first_appearance(word.as_bytes(), dir, &grid, rules, SearchLimits::default())
            .map(|r| r.level())
            .map_err(|e| e.to_string())
    };
    check(level("CACABA", Direction::E, "A", &ex1)? == Some(6), "CACABA from A")?;
    check(level("BB", Direction::SE, "A", &ex2)? == Some(3), "diagonal BB")?;
    check(level("AA", Direction::SE, "A", &ex2)?.is_none(), "diagonal AA")?;
    let latest = latest_first_appearance(b"A", Direction::E, &ex1, SearchLimits::default()).map_err(|e| e.to_string())?;
    check(latest.level == Some(3) && latest.l1.as_deref() == Some("C"), format!("latest A {latest:?}"))?;
    check(level("A", Direction::E, "CCC", &ex1)? == Some(3), "A from CCC")?;
    within(start.elapsed(), Duration::from_secs(1))
}

fn main() {
    let mut results: BTreeMap<u32, (&str, Outcome)> = BTreeMap::new();
    results.insert(1, ("contraction golden grid", contraction_golden()));
    results.insert(2, ("word-level table", word_levels()));
    results.insert(3, ("level sum and X answer", sum_and_answer()));
    results.insert(4, ("secret message", secret_message()));
    results.insert(5, ("two-letter sweeps", footnote_sweeps()));

    let start = Instant::now();
    let tally = random_instances();
    let elapsed = start.elapsed();
    let summary = format!(
        "{} instances, {} comparisons ({} found, {} beyond level {FORWARD_LEVELS}, {} never), {elapsed:.1?}",
        tally.instances, tally.comparisons, tally.found, tally.beyond, tally.never
    );
    let sixth = if !tally.mismatches.is_empty() {
        Err(format!("{summary}; mismatches {:?}", tally.mismatches))
    } else if tally.instances < 1000 || tally.found == 0 || tally.never == 0 {
        Err(format!("{summary}; coverage too thin"))
    } else {
        within(elapsed, Duration::from_secs(300)).map(|_| summary)
    };
    results.insert(6, ("backward search matches forward materialization", sixth));
    results.insert(
        7,
        (
            "bound dominance",
            check(
                tally.bound_violations.is_empty(),
                format!("{} checks, violations {:?}", tally.bound_checks, tally.bound_violations),
            ),
        ),
    );
    results.insert(8, ("identical-rows rules", identical_rows()));
    results.insert(9, ("micro-examples", micro_examples()));

    let mut failed = 0;
    for (id, (name, outcome)) in &results {
        match outcome {
            Ok(detail) => println!("criterion {id} PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id} FAIL {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
