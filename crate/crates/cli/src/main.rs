use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fractal_core::ancestry::{word_addresses, TreeNode};
use fractal_core::bounds::{bound_table, BoundRow};
use fractal_core::format::{parse_rule_file, render_grid};
use fractal_core::oracle::{sweep_max_latest, ForwardTable, DEFAULT_CELL_CAP};
use fractal_core::puzzle::{load_puzzle, solve, SolveOptions, SolveReport};
use fractal_core::{
    ancestor_tree, contract, expand, first_appearance, Dimension, Direction, Error, Grid, RuleSet, SearchLimits,
    SearchResult,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser, Debug)]
#[command(name = "fractal", version, about = "Find words hidden in letter-substitution grids")]
struct Cli {
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply the replacement rules to a grid.
    Expand(ExpandArgs),
    /// Undo one replacement step.
    Contract(GridArgs),
    /// Earliest level on which a word appears.
    Search(SearchArgs),
    /// Closed-form bounds on the latest first appearance.
    Bounds(BoundsArgs),
    /// Brute-force checks.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Solve a puzzle file.
    Solve(SolveArgs),
    /// Ancestor tree of a word.
    Tree(TreeArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TreeFormat {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Dim {
    #[value(name = "1d")]
    One,
    #[value(name = "2d")]
    Two,
}

#[derive(Args, Debug)]
struct GridArgs {
    /// Rule file with an [alphabet] section and optionally a [grid].
    #[arg(long)]
    rules: PathBuf,
    /// Grid rows separated by '/', overriding the file's grid.
    #[arg(long, alias = "l1")]
    grid: Option<String>,
    /// Level of --grid.
    #[arg(long, default_value_t = 1)]
    level: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct ExpandArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value_t = 1)]
    steps: u32,
    /// Refuse to materialize more cells than this.
    #[arg(long, default_value_t = DEFAULT_CELL_CAP)]
    max_cells: u64,
}

#[derive(Args, Debug)]
struct Caps {
    /// Deepest ancestor level to explore; unlimited by default.
    #[arg(long)]
    depth_cap: Option<u32>,
    /// Largest Cartesian product of parent candidates per alignment.
    #[arg(long, default_value_t = 1_000_000)]
    product_cap: u64,
}

impl Caps {
    fn limits(&self) -> SearchLimits {
        SearchLimits {
            depth_cap: self.depth_cap,
            product_cap: self.product_cap,
        }
    }
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long)]
    rules: PathBuf,
    /// Level-1 grid, rows separated by '/'; defaults to the file's grid.
    #[arg(long)]
    l1: Option<String>,
    #[arg(long)]
    word: String,
    #[arg(long, default_value = "E")]
    direction: Direction,
    /// Exit with status 1 if the word never appears.
    #[arg(long)]
    expect_found: bool,
    #[command(flatten)]
    caps: Caps,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    b: u64,
    #[arg(long)]
    n: u64,
    /// Single word length.
    #[arg(long, conflicts_with = "max_len")]
    len: Option<u64>,
    /// Tabulate lengths 1 to this value.
    #[arg(long)]
    max_len: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// Latest first appearance over every rule set of one shape.
    Sweep(SweepArgs),
    /// Compare backward search with forward expansion on random systems.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    b: usize,
    #[arg(long, value_enum, default_value_t = Dim::One)]
    dim: Dim,
    /// Longest word considered.
    #[arg(long, default_value_t = 2)]
    len_cap: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long, default_value_t = 100)]
    cases: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Forward expansion depth.
    #[arg(long, default_value_t = 8)]
    levels: u32,
}

#[derive(Args, Debug)]
struct SolveArgs {
    file: PathBuf,
    /// Print the full report as JSON.
    #[arg(long)]
    json: bool,
    /// Write each word's ancestor tree into this directory.
    #[arg(long)]
    tree_dir: Option<PathBuf>,
    /// Cross out every occurrence on a word's earliest level.
    #[arg(long)]
    cross_all: bool,
    /// Half the side of the answer window.
    #[arg(long, default_value_t = 4)]
    window_radius: usize,
    #[command(flatten)]
    caps: Caps,
}

#[derive(Args, Debug)]
struct TreeArgs {
    #[arg(long)]
    rules: PathBuf,
    /// Ground the tree in this level-1 grid; by default it runs to the fixpoint.
    #[arg(long)]
    l1: Option<String>,
    #[arg(long)]
    word: String,
    #[arg(long, default_value = "E")]
    direction: Direction,
    #[command(flatten)]
    caps: Caps,
    #[arg(long, value_enum, default_value_t = TreeFormat::Text)]
    format: TreeFormat,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(64) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(64);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let resource = e.chain().any(|c| c.downcast_ref::<Error>().is_some_and(Error::is_resource));
            ExitCode::from(if resource { 2 } else { 1 })
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Expand(args) => expand_cmd(args),
        Command::Contract(args) => contract_cmd(args),
        Command::Search(args) => search_cmd(args),
        Command::Bounds(args) => bounds_cmd(args),
        Command::Oracle(OracleCommand::Sweep(args)) => sweep_cmd(args),
        Command::Oracle(OracleCommand::Check(args)) => check_cmd(args),
        Command::Solve(args) => solve_cmd(args),
        Command::Tree(args) => tree_cmd(args),
    }
    .map(|()| ExitCode::SUCCESS)
    .or_else(|e| match e.downcast_ref::<NotFound>() {
        Some(_) => {
            eprintln!("{e}");
            Ok(ExitCode::from(1))
        }
        None => Err(e),
    })
}

#[derive(Debug)]
struct NotFound(String);

impl std::fmt::Display for NotFound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} never appears", self.0)
    }
}

impl std::error::Error for NotFound {}

fn load_rules(path: &Path) -> Result<(RuleSet, Option<Grid>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file = parse_rule_file(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok((file.rules, file.grid))
}

fn pick_grid(text: Option<&str>, level: u32, fallback: Option<Grid>) -> Result<Grid> {
    match (text, fallback) {
        (Some(t), _) => Ok(Grid::parse(t, level)?),
        (None, Some(g)) => Ok(g),
        (None, None) => bail!("no grid given and the rule file has no [grid] section"),
    }
}

fn print_grid(grid: &Grid, format: Format) -> Result<()> {
    match format {
        Format::Json => println!(
            "{}",
            serde_json::json!({ "level": grid.level(), "rows": grid.row_strings() })
        ),
        Format::Csv => bail!("grids have no CSV form"),
        Format::Text => print!("{}", render_grid(grid)),
    }
    Ok(())
}

fn expand_cmd(args: ExpandArgs) -> Result<()> {
    let (rules, file_grid) = load_rules(&args.grid.rules)?;
    let grid = pick_grid(args.grid.grid.as_deref(), args.grid.level, file_grid)?;
    let shape = rules.block_shape();
    let cells = (grid.rows() * grid.cols()) as u128
        * (shape.rows as u128 * shape.cols as u128).saturating_pow(args.steps);
    if cells > u128::from(args.max_cells) {
        return Err(Error::ResourceLimit {
            what: "materialized cells",
            requested: cells,
            cap: u128::from(args.max_cells),
        }
        .into());
    }
    print_grid(&expand(&grid, &rules, args.steps)?, args.grid.format)
}

fn contract_cmd(args: GridArgs) -> Result<()> {
    let (rules, file_grid) = load_rules(&args.rules)?;
    let grid = pick_grid(args.grid.as_deref(), args.level, file_grid)?;
    print_grid(&contract(&grid, &rules)?, args.format)
}

fn search_cmd(args: SearchArgs) -> Result<()> {
    let (rules, file_grid) = load_rules(&args.rules)?;
    let l1 = pick_grid(args.l1.as_deref(), 1, file_grid)?;
    let word = args.word.to_ascii_uppercase();
    let result: SearchResult = first_appearance(word.as_bytes(), args.direction, &l1, &rules, args.caps.limits())?;
    match args.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&result)?),
        Format::Csv => bail!("search results have no CSV form"),
        Format::Text => match result.found() {
            Some(found) => {
                let cells = word_addresses(found, args.direction, &l1, &rules)?;
                println!("level {}", found.level);
                println!("ancestor {} at level-1 row {}, col {}", found.ancestor, found.anchor.0, found.anchor.1);
                let shape = rules.block_shape();
                let first = &cells[0];
                println!(
                    "first letter at row {}, col {}",
                    first.row::<fractal_core::BigCoord>(shape),
                    first.col::<fractal_core::BigCoord>(shape)
                );
                println!("{} patterns expanded", result.stats.nodes_expanded);
            }
            None => println!("never appears ({} patterns expanded)", result.stats.nodes_expanded),
        },
    }
    if args.expect_found && result.found().is_none() {
        return Err(NotFound(word).into());
    }
    Ok(())
}

fn bounds_cmd(args: BoundsArgs) -> Result<()> {
    let lens: Vec<u64> = match (args.len, args.max_len) {
        (Some(len), _) => vec![len],
        (None, Some(max)) => (1..=max).collect(),
        (None, None) => bail!("give --len or --max-len"),
    };
    let rows: Vec<BoundRow> = bound_table(args.b, args.n, lens)?;
    match args.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&rows)?),
        Format::Csv => {
            println!("b,n,len,w1,w2,max_parent_len");
            for r in &rows {
                println!("{},{},{},{},{},{}", r.b, r.n, r.len, r.w1, r.w2, r.max_parent_len);
            }
        }
        Format::Text => {
            for r in &rows {
                println!("b={} n={} len={}: w1={} w2={} max_parent_len={}", r.b, r.n, r.len, r.w1, r.w2, r.max_parent_len);
            }
        }
    }
    Ok(())
}

fn sweep_cmd(args: SweepArgs) -> Result<()> {
    let dimension = match args.dim {
        Dim::One => Dimension::One,
        Dim::Two => Dimension::Two,
    };
    let report = sweep_max_latest(args.n, args.b, dimension, args.len_cap, SearchLimits::default())?;
    match args.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        Format::Csv => {
            println!("rule_set,max_latest");
            for (i, m) in report.per_rule_set.iter().enumerate() {
                println!("{i},{m}");
            }
        }
        Format::Text => {
            println!("{} rule sets, global maximum {}", report.rule_sets, report.global_max);
            for (i, m) in report.per_length.iter().enumerate() {
                println!("  words of length {}: {m}", i + 1);
            }
            if let Some(w) = &report.witness {
                println!(
                    "  attained by {} {} from {} under {}",
                    w.word,
                    w.direction,
                    w.l1,
                    w.rules.join(" ")
                );
            }
        }
    }
    Ok(())
}

fn check_cmd(args: CheckArgs) -> Result<()> {
    const LETTERS: &[u8] = b"ABCD";
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut mismatches = 0;
    let mut compared = 0;
    for _ in 0..args.cases {
        let n = rng.gen_range(1..=3);
        let two_d = rng.gen_bool(0.5);
        let area = if two_d { 4 } else { 2 };
        let texts: Vec<String> = (0..n)
            .map(|_| {
                let s: String = (0..area).map(|_| LETTERS[rng.gen_range(0..n)] as char).collect();
                if two_d { format!("{}/{}", &s[..2], &s[2..]) } else { s }
            })
            .collect();
        let entries: Vec<(char, &str)> = texts.iter().enumerate().map(|(i, t)| (LETTERS[i] as char, t.as_str())).collect();
        let rules = RuleSet::from_rules(&entries)?;
        let rows = if two_d { rng.gen_range(1..=3) } else { 1 };
        let cols = rng.gen_range(1..=3);
        let cells: Vec<u8> = (0..rows * cols).map(|_| LETTERS[rng.gen_range(0..n)]).collect();
        let l1 = Grid::new(rows, cols, cells, 1)?;
        let table = ForwardTable::build(&l1, &rules, args.levels, 3, DEFAULT_CELL_CAP)?;
        let len = rng.gen_range(1..=3);
        let word: Vec<u8> = (0..len).map(|_| LETTERS[rng.gen_range(0..n)]).collect();
        let direction = Direction::ALL[rng.gen_range(0..8)];
        let backward = first_appearance(&word, direction, &l1, &rules, SearchLimits::default())?.level();
        let forward = table.first_level(&word, direction);
        let expected = backward.filter(|&l| l <= args.levels);
        compared += 1;
        if forward != expected {
            mismatches += 1;
            println!(
                "mismatch: {} {direction} from {l1} under {}: backward {backward:?}, forward {forward:?}",
                String::from_utf8_lossy(&word),
                texts.join(" ")
            );
        }
    }
    println!("{compared} cases, {mismatches} mismatches");
    if mismatches > 0 {
        bail!("backward and forward search disagree");
    }
    Ok(())
}

fn solve_cmd(args: SolveArgs) -> Result<()> {
    let spec = load_puzzle(&args.file).with_context(|| format!("loading {}", args.file.display()))?;
    let options = SolveOptions {
        limits: args.caps.limits(),
        cross_all: args.cross_all,
        window_radius: args.window_radius,
    };
    let report = solve(&spec, options)?;
    if let Some(dir) = &args.tree_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for p in &report.placements {
            let tree: TreeNode = ancestor_tree(p.word.as_bytes(), p.direction, &spec.rules, Some(&spec.l1), options.limits)?;
            fs::write(dir.join(format!("{}.dot", p.word)), tree.to_dot())?;
            fs::write(dir.join(format!("{}.json", p.word)), serde_json::to_string_pretty(&tree)?)?;
        }
    }
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print_report(&report);
    }
    Ok(())
}

fn print_report(report: &SolveReport) {
    println!("{:<12} {:>5} {:>4}  {:<10} expanded", "word", "level", "dir", "anchor");
    for p in &report.placements {
        println!(
            "{:<12} {:>5} {:>4}  ({:>2}, {:>2})   {}",
            p.word, p.level, p.direction.as_str(), p.anchor.0, p.anchor.1, p.stats.nodes_expanded
        );
    }
    let counts: Vec<String> = report.level_counts.iter().map(|(l, c)| format!("{c} on level {l}")).collect();
    println!("words: {}", counts.join(", "));
    println!("level sum: {}", report.level_sum);
    println!("uncrossed letters: {}", report.message);
    match (&report.window, &report.window_error) {
        (Some(w), _) => {
            println!("window on level {} around level-1 cell {:?}:", w.level, w.marker_cell);
            for row in &w.rows {
                println!("  {row}");
            }
            match &w.x_shape {
                Some(x) => println!("answer: {} ({} + {})", x.answer, x.main_diagonal, x.anti_diagonal),
                None => println!("answer: no X found in the window"),
            }
        }
        (None, Some(e)) => println!("window unavailable: {e}"),
        (None, None) => {}
    }
}

fn tree_cmd(args: TreeArgs) -> Result<()> {
    let (rules, _) = load_rules(&args.rules)?;
    let l1 = args.l1.as_deref().map(|t| Grid::parse(t, 1)).transpose()?;
    let word = args.word.to_ascii_uppercase();
    let tree = ancestor_tree(word.as_bytes(), args.direction, &rules, l1.as_ref(), args.caps.limits())?;
    match args.format {
        TreeFormat::Text => print!("{}", tree.to_text()),
        TreeFormat::Dot => print!("{}", tree.to_dot()),
        TreeFormat::Json => println!("{}", serde_json::to_string_pretty(&tree)?),
    }
    Ok(())
}
