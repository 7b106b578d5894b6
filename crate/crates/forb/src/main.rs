mod reproduce;

use clap::{ArgGroup, Args, Parser, Subcommand};
use forb::bounds::{forb_bound, upper_bound_simple};
use forb::constructions::{
    assemble, builtin_block, builtin_extremal, conjecture_block, ConstructionPlan,
};
use forb::containment::{contains, ForbiddenPattern};
use forb::matrix::BinaryMatrix;
use forb::rowgraph::{analysis_json, build_graph};
use forb::search::{enumerate_extremal, forb_search, max_bounded_diff};
use std::path::{Path, PathBuf};
use std::process::exit;
use std::time::Duration;

/// BSD sysexits EX_USAGE: bad flags, unreadable or malformed input.
const EXIT_USAGE: i32 = 64;
/// A search ran out of budget before exhausting its space.
const EXIT_BUDGET: i32 = 2;

#[derive(Parser)]
#[command(
    name = "forb",
    version,
    about = "Search, bounds and constructions for matrices avoiding F(0,p,1,0)",
    after_help = "Set FORB_LOG=debug for progress logging."
)]
struct Cli {
    /// Worker threads for search subtrees; 1 guarantees bit-identical output
    #[arg(long, global = true, default_value_t = 1, value_name = "N")]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact forb(m, F) by branch and bound
    Forb(ForbArgs),
    /// Test whether a matrix avoids a forbidden pattern
    Check(CheckArgs),
    /// Row graph, components, order and costs of an avoiding matrix, as JSON
    Analyze(AnalyzeArgs),
    /// Emit a builtin extremal construction
    Construct(ConstructArgs),
    /// Closed-form bound on forb(m, F(0,p,1,0)) with its status
    Bound(BoundArgs),
    /// All extremal matrices up to row and column permutation
    Enumerate(EnumerateArgs),
    /// Compare the bounded-difference search against the closed-form bound
    Oracle(OracleArgs),
    /// Emit the conjectured extremal block for a t-rowed pattern family
    ConjectureBlock(ConjectureBlockArgs),
    /// Recompute the headline values and report claimed vs computed
    Reproduce(ReproduceArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("pattern").required(true).args(["p", "forbidden"])))]
struct PatternSpec {
    /// Pattern parameter p of F(0,p,1,0)
    #[arg(long, value_name = "P")]
    p: Option<u32>,
    /// File holding an arbitrary forbidden pattern instead
    #[arg(long, value_name = "FILE")]
    forbidden: Option<PathBuf>,
}

#[derive(Args)]
struct ForbArgs {
    /// Number of rows m
    #[arg(long, value_name = "M")]
    rows: u32,
    #[command(flatten)]
    pattern: PatternSpec,
    /// Time budget in seconds
    #[arg(long, default_value_t = 300.0, value_name = "SECS")]
    budget: f64,
    /// Write the witness (or the extremal classes) to this file
    #[arg(long, value_name = "FILE")]
    witness: Option<PathBuf>,
    /// Also enumerate the extremal matrices up to isomorphism
    #[arg(long)]
    enumerate: bool,
}

#[derive(Args)]
struct CheckArgs {
    /// Matrix file (grid or compact format)
    matrix: PathBuf,
    #[command(flatten)]
    pattern: PatternSpec,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Matrix file (grid or compact format)
    matrix: PathBuf,
    /// Pattern parameter p of F(0,p,1,0)
    #[arg(long, value_name = "P")]
    p: u32,
}

#[derive(Args)]
struct ConstructArgs {
    /// Pattern parameter p of F(0,p,1,0)
    #[arg(long, value_name = "P")]
    p: u32,
    /// Number of rows m
    #[arg(long, value_name = "M")]
    rows: u32,
    /// Block variant; p=6 offers "complement-style" and "cycle" besides "default"
    #[arg(long, value_name = "NAME")]
    variant: Option<String>,
    /// Output file (stdout when absent)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    /// Pattern parameter p of F(0,p,1,0)
    #[arg(long, value_name = "P")]
    p: u32,
    /// Number of rows m
    #[arg(long, value_name = "M")]
    rows: u32,
}

#[derive(Args)]
struct EnumerateArgs {
    /// Number of rows m
    #[arg(long, value_name = "M")]
    rows: u32,
    #[command(flatten)]
    pattern: PatternSpec,
    /// Time budget in seconds, applied to each phase
    #[arg(long, default_value_t = 300.0, value_name = "SECS")]
    budget: f64,
    /// Write the classes to this file instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Number of rows k
    #[arg(long, value_name = "K")]
    k: u32,
    /// Maximum number of columns any two rows may differ in
    #[arg(long, value_name = "T")]
    t: u32,
    /// Time budget in seconds
    #[arg(long, default_value_t = 300.0, value_name = "SECS")]
    budget: f64,
}

#[derive(Args)]
struct ConjectureBlockArgs {
    /// Number of rows t of the block
    #[arg(long, value_name = "T")]
    t: u32,
    /// Output file (stdout when absent)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Time budget in seconds per search row
    #[arg(long, default_value_t = 300.0, value_name = "SECS")]
    budget: f64,
}

fn main() {
    // Die quietly when a downstream pager or head closes the pipe.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FORB_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    exit(0);
                }
                _ => {
                    eprint!("{e}");
                    exit(EXIT_USAGE);
                }
            }
        }
    };
    let jobs = cli.jobs.max(1);
    let code = match cli.command {
        Command::Forb(a) => cmd_forb(a, jobs),
        Command::Check(a) => cmd_check(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Construct(a) => cmd_construct(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Enumerate(a) => cmd_enumerate(a, jobs),
        Command::Oracle(a) => cmd_oracle(a, jobs),
        Command::ConjectureBlock(a) => cmd_conjecture_block(a),
        Command::Reproduce(a) => reproduce::run(a.budget, jobs),
    };
    exit(code);
}

fn fail_usage(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn load_matrix(path: &Path) -> Result<BinaryMatrix, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    BinaryMatrix::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

impl PatternSpec {
    fn load(&self) -> Result<(ForbiddenPattern, String), String> {
        match (self.p, &self.forbidden) {
            (Some(p), None) => {
                let pattern = ForbiddenPattern::two_row(p).map_err(|e| e.to_string())?;
                Ok((pattern, format!("F(0,{p},1,0)")))
            }
            (None, Some(path)) => {
                let f = load_matrix(path)?;
                let name = format!("pattern from {}", path.display());
                Ok((ForbiddenPattern::General(f), name))
            }
            _ => unreachable!("clap enforces exactly one"),
        }
    }
}

fn parse_budget(secs: f64) -> Result<Duration, String> {
    if secs <= 0.0 || !secs.is_finite() {
        return Err("budget must be positive".into());
    }
    Ok(Duration::from_secs_f64(secs))
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_forb(a: ForbArgs, jobs: usize) -> i32 {
    let (pattern, name) = match a.pattern.load() {
        Ok(x) => x,
        Err(e) => return fail_usage(e),
    };
    let budget = match parse_budget(a.budget) {
        Ok(b) => b,
        Err(e) => return fail_usage(e),
    };
    if a.enumerate {
        return run_enumerate(a.rows, &pattern, &name, budget, jobs, &a.witness);
    }
    let r = match forb_search(a.rows, &pattern, budget, jobs) {
        Ok(r) => r,
        Err(e) => return fail_usage(e),
    };
    let rel = if r.optimal { "=" } else { ">=" };
    println!("forb({}, {name}) {rel} {}", a.rows, r.value);
    println!(
        "status: {}",
        if r.optimal {
            "optimal"
        } else {
            "budget-expired"
        }
    );
    println!("nodes: {}", r.nodes);
    println!("elapsed: {:.3}s", r.elapsed.as_secs_f64());
    if let Some(path) = &a.witness {
        if let Err(e) = write_or_print(&Some(path.clone()), &r.witness.to_text()) {
            return fail_usage(e);
        }
    }
    if r.optimal {
        0
    } else {
        EXIT_BUDGET
    }
}

fn run_enumerate(
    rows: u32,
    pattern: &ForbiddenPattern,
    name: &str,
    budget: Duration,
    jobs: usize,
    out: &Option<PathBuf>,
) -> i32 {
    let e = match enumerate_extremal(rows, pattern, budget, jobs) {
        Ok(e) => e,
        Err(e) => return fail_usage(e),
    };
    println!("forb({rows}, {name}) = {}", e.value);
    println!("classes: {}", e.classes.len());
    println!(
        "status: {}",
        if e.exhaustive {
            "exhaustive"
        } else {
            "budget-expired"
        }
    );
    println!("nodes: {}", e.nodes);
    println!("elapsed: {:.3}s", e.elapsed.as_secs_f64());
    let listing: String = e
        .classes
        .iter()
        .map(|c| c.to_text())
        .collect::<Vec<_>>()
        .join("\n");
    if out.is_none() && !e.classes.is_empty() {
        println!();
    }
    if let Err(err) = write_or_print(out, &listing) {
        return fail_usage(err);
    }
    if e.exhaustive {
        0
    } else {
        EXIT_BUDGET
    }
}

fn cmd_check(a: CheckArgs) -> i32 {
    let (pattern, name) = match a.pattern.load() {
        Ok(x) => x,
        Err(e) => return fail_usage(e),
    };
    let m = match load_matrix(&a.matrix) {
        Ok(m) => m,
        Err(e) => return fail_usage(e),
    };
    match contains(&m, &pattern) {
        None => {
            println!("avoids {name}");
            0
        }
        Some(w) => {
            println!("contains {name}");
            println!(
                "witness rows: {}",
                w.rows
                    .iter()
                    .map(|r| r.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            );
            println!(
                "witness columns: {}",
                w.cols
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            );
            1
        }
    }
}

fn cmd_analyze(a: AnalyzeArgs) -> i32 {
    if a.p == 0 {
        return fail_usage("p must be at least 1");
    }
    let m = match load_matrix(&a.matrix) {
        Ok(m) => m,
        Err(e) => return fail_usage(e),
    };
    match build_graph(&m, a.p) {
        Ok(report) => {
            let json = analysis_json(&m, &report);
            println!("{}", serde_json::to_string_pretty(&json).unwrap());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn cmd_construct(a: ConstructArgs) -> i32 {
    let built = match a.variant.as_deref() {
        None | Some("default") => builtin_extremal(a.p, a.rows),
        Some(name) => variant_extremal(a.p, a.rows, name),
    };
    match built {
        Ok(m) => match write_or_print(&a.out, &m.to_text()) {
            Ok(()) => 0,
            Err(e) => fail_usage(e),
        },
        Err(e) => fail_usage(e),
    }
}

/// Non-default variants repeat one specific block, so they only cover
/// multiples of its row count.
fn variant_extremal(
    p: u32,
    rows: u32,
    variant: &str,
) -> Result<BinaryMatrix, forb::constructions::ConstructError> {
    use forb::constructions::ConstructError;
    let entry = builtin_block(p, variant)?;
    if rows == 0 || !rows.is_multiple_of(entry.rows()) {
        return Err(ConstructError::UnsupportedResidue { p, m: rows });
    }
    let reps = (rows / entry.rows()) as usize;
    let plan = ConstructionPlan {
        p,
        blocks: vec![entry; reps],
    };
    assemble(&plan)
}

fn cmd_bound(a: BoundArgs) -> i32 {
    match forb_bound(a.p, a.rows) {
        Ok(b) => {
            println!("value: {}", b.value);
            println!("status: {}", b.status);
            println!("c_p: {}", b.cp);
            0
        }
        Err(e) => fail_usage(e),
    }
}

fn cmd_enumerate(a: EnumerateArgs, jobs: usize) -> i32 {
    let (pattern, name) = match a.pattern.load() {
        Ok(x) => x,
        Err(e) => return fail_usage(e),
    };
    let budget = match parse_budget(a.budget) {
        Ok(b) => b,
        Err(e) => return fail_usage(e),
    };
    run_enumerate(a.rows, &pattern, &name, budget, jobs, &a.out)
}

fn cmd_oracle(a: OracleArgs, jobs: usize) -> i32 {
    let budget = match parse_budget(a.budget) {
        Ok(b) => b,
        Err(e) => return fail_usage(e),
    };
    let r = match max_bounded_diff(a.k, a.t, budget, jobs) {
        Ok(r) => r,
        Err(e) => return fail_usage(e),
    };
    println!("max_bounded_diff({}, {}) = {}", a.k, a.t, r.value);
    match upper_bound_simple(a.k, a.t) {
        Ok(b) => {
            println!("upper_bound_simple({}, {}) = {b}", a.k, a.t);
            println!("tight: {}", r.optimal && r.value as i64 == b);
        }
        Err(e) => println!("upper_bound_simple({}, {}): {e}", a.k, a.t),
    }
    if r.optimal {
        0
    } else {
        println!("status: budget-expired");
        EXIT_BUDGET
    }
}

fn cmd_conjecture_block(a: ConjectureBlockArgs) -> i32 {
    match conjecture_block(a.t) {
        Ok(entry) => match write_or_print(&a.out, &entry.block.to_text()) {
            Ok(()) => 0,
            Err(e) => fail_usage(e),
        },
        Err(e) => fail_usage(e),
    }
}
