//! Command-line front end: solve for minimum generating sets, inspect chief
//! series, print orders, and run benchmark suites.
//!
//! Exit codes: `0` success, `2` when a certified solve would exceed the
//! exhaustive-sweep cap, `3` when `--oracle-check` finds a discrepancy, `1`
//! for every other error. Errors go to stderr. With `--json`, stdout carries
//! exactly one JSON object per result line and all notices move to stderr,
//! so identical inputs (expression, seed, flags) give byte-identical stdout.

use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use permgen::constructions::build;
use permgen::mingen::{min_generating_set, MinGenOptions, MinGenResult, Mode};
use permgen::oracle;
use permgen::report::{ChiefReport, SolveReport};
use permgen::structure::{chief_series, SeriesOrdering};
use permgen::{Error, Group};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Environment override for the largest exhaustive modification sweep a
/// certified solve may attempt.
const CAP_ENV_VAR: &str = "PERMGEN_EXHAUSTIVE_CAP";

/// Most candidate sets the `--oracle-check` exhaustive search may visit;
/// beyond this the check is skipped with a notice.
const ORACLE_CHECK_MAX_SETS: u128 = 2_000_000;

/// Largest group order `--oracle-check` will enumerate.
const ORACLE_CHECK_MAX_ORDER: u64 = 5000;

#[derive(Parser)]
#[command(
    name = "permgen",
    version,
    about = "Minimum-size generating sets for finite permutation groups",
    after_help = "Group expressions:\n  \
        sym(n), alt(n), cyclic(n), dihedral(n), q8, psl_3_2,\n  \
        direct_product(a, b, ...), direct_power(a, k),\n  \
        wreath(a, b) (imprimitive action), crown_inversion(p, k),\n  \
        raw(degree, \"cycles\", ...), from_file(\"path\")\n\n\
        Points are 1-based in all cycle notation."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute d(G) and a generating set of that size
    Mingen(MingenArgs),
    /// Print the chief series, bottom-up, with per-factor statistics
    Chief(ChiefArgs),
    /// Print the exact group order
    Order(OrderArgs),
    /// Run a benchmark suite
    Bench(BenchArgs),
}

#[derive(Args)]
struct MingenArgs {
    /// Group expression, e.g. "direct_power(alt(5),19)"
    spec: String,
    /// RNG seed; same expression, seed, and flags give identical output
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Whether minimality must be proved or may be a sampled upper bound
    #[arg(long, value_enum, default_value_t = ModeArg::Certified)]
    mode: ModeArg,
    /// Disable the nilpotent and quick-random-tuple shortcuts
    #[arg(long)]
    no_fast_paths: bool,
    /// Cross-check d by exhaustive search when the group is small enough
    #[arg(long)]
    oracle_check: bool,
    /// Print test counters and the per-factor branch trace
    #[arg(long)]
    stats: bool,
    /// Emit one JSON object instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ChiefArgs {
    /// Group expression
    spec: String,
    /// RNG seed for the series search
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit one JSON object instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct OrderArgs {
    /// Group expression
    spec: String,
}

#[derive(Args)]
struct BenchArgs {
    /// Which suite to run
    #[arg(long, value_enum)]
    suite: SuiteArg,
    /// Skip suite entries whose degree exceeds this
    #[arg(long)]
    max_degree: Option<usize>,
    /// Solves per group, seeded seed, seed+1, ...
    #[arg(long, default_value_t = 1)]
    runs: u64,
    /// Base RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit one JSON object per solve on stdout; the table moves to stderr
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Prove minimality (may exit 2 if a sweep would be too large)
    Certified,
    /// Never exceed the cap; the size may be an uncertified upper bound
    Heuristic,
}

impl ModeArg {
    fn to_mode(self) -> Mode {
        match self {
            ModeArg::Certified => Mode::Certified,
            ModeArg::Heuristic => Mode::Heuristic,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    /// Four headline groups: two big alternating powers, a linear-group
    /// power, and a tall crown product
    PaperTable,
    /// Alternating powers of growing degree, fast paths off, with a fitted
    /// constant C such that total tests <= C * n^2 * ln n
    Scaling,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Keep exit 2 reserved for the sweep cap: usage errors exit 1,
            // help/version exit 0.
            let help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            e.print().expect("cannot write clap output");
            std::process::exit(if help { 0 } else { 1 });
        }
    };
    let code = match &cli.cmd {
        Cmd::Mingen(a) => run_mingen(a),
        Cmd::Chief(a) => run_chief(a),
        Cmd::Order(a) => run_order(a),
        Cmd::Bench(a) => run_bench(a),
    };
    std::process::exit(code);
}

/// Report a library error on stderr and pick the exit code for it.
fn fail(e: &Error) -> i32 {
    eprintln!("error: {e}");
    if matches!(e, Error::ExhaustiveCapExceeded(..)) {
        2
    } else {
        1
    }
}

/// Apply the `PERMGEN_EXHAUSTIVE_CAP` override, if set.
fn apply_env_cap(opts: &mut MinGenOptions) -> Result<(), i32> {
    match std::env::var(CAP_ENV_VAR) {
        Ok(text) => match text.trim().parse::<u64>() {
            Ok(cap) => {
                opts.exhaustive_cap = cap;
                Ok(())
            }
            Err(_) => {
                eprintln!("error: {CAP_ENV_VAR} must be an unsigned integer, got {text:?}");
                Err(1)
            }
        },
        Err(_) => Ok(()),
    }
}

fn run_mingen(a: &MingenArgs) -> i32 {
    let g = match build(&a.spec) {
        Ok(g) => g,
        Err(e) => return fail(&e),
    };
    let mut opts = MinGenOptions {
        mode: a.mode.to_mode(),
        use_fast_paths: !a.no_fast_paths,
        ..MinGenOptions::default()
    };
    if let Err(code) = apply_env_cap(&mut opts) {
        return code;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let res = match min_generating_set(&g, &opts, &mut rng) {
        Ok(res) => res,
        Err(e) => return fail(&e),
    };
    if a.json {
        let report = SolveReport::new(&a.spec, &g, &res, opts.mode, a.seed);
        println!("{}", report.to_json_line());
    } else {
        println!("d = {}", res.d);
        for p in &res.gens {
            println!("{}", p.to_cycles_string());
        }
        if !res.certified_minimal {
            println!("minimality not certified (sampled upper bound)");
        }
        if a.stats {
            print_stats(&res);
        }
    }
    if a.oracle_check {
        oracle_check(&g, &res, a.json)
    } else {
        0
    }
}

fn print_stats(res: &MinGenResult) {
    println!("ss_tests = {}", res.stats.ss_tests);
    println!("rss_tests = {}", res.stats.rss_tests);
    println!("random_elements = {}", res.stats.random_elements);
    if !res.stats.per_factor.is_empty() {
        println!("trace:");
        for t in &res.stats.per_factor {
            if t.factor == 0 {
                println!("  whole {}: {}", t.branch, t.trials);
            } else {
                println!("  factor {} {}: {}", t.factor, t.branch, t.trials);
            }
        }
    }
}

/// `C(n, k)` clamped at `cap`.
fn binomial_capped(n: u64, k: u64, cap: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if acc >= cap {
            return cap;
        }
    }
    acc
}

/// Cross-check a claimed minimum size against the exhaustive search.
/// Returns the process exit code.
fn oracle_check(g: &Group, res: &MinGenResult, json: bool) -> i32 {
    let notice = |msg: &str| {
        if json {
            eprintln!("{msg}");
        } else {
            println!("{msg}");
        }
    };
    let Some(order) = g.order_u64() else {
        notice("oracle check skipped (|G| too big for exhaustive search)");
        return 0;
    };
    if order > ORACLE_CHECK_MAX_ORDER {
        notice("oracle check skipped (|G| too big for exhaustive search)");
        return 0;
    }
    if res.d == 0 {
        notice("oracle agrees: the trivial group needs no generators");
        return 0;
    }
    // Estimate the number of candidate sets the sweep would visit: the first
    // element ranges over non-identity class representatives, the rest over
    // (m-1)-subsets of the other non-identity elements.
    let enumerated = match oracle::enumerate_group(g) {
        Ok(e) => e,
        Err(e) => return fail(&e),
    };
    let reps = enumerated.conjugacy_classes().len().saturating_sub(1) as u128;
    let mut sets: u128 = 0;
    for m in 1..=res.d as u64 {
        sets = sets.saturating_add(
            reps.saturating_mul(binomial_capped(order - 2, m - 1, ORACLE_CHECK_MAX_SETS)),
        );
    }
    if sets > ORACLE_CHECK_MAX_SETS {
        notice("oracle check skipped (|G| too big for exhaustive search)");
        return 0;
    }
    match oracle::oracle_min_gen(g, res.d) {
        Ok(m) if m == res.d => {
            notice(&format!(
                "oracle agrees: exhaustive search confirms d = {m}"
            ));
            0
        }
        Ok(m) => {
            eprintln!(
                "oracle mismatch: reported d = {} but exhaustive search found a generating set of size {m}",
                res.d
            );
            3
        }
        Err(Error::NotFoundWithin(_)) => {
            eprintln!(
                "oracle mismatch: reported d = {} but exhaustive search found no generating set that small",
                res.d
            );
            3
        }
        Err(e) => fail(&e),
    }
}

fn run_chief(a: &ChiefArgs) -> i32 {
    let g = match build(&a.spec) {
        Ok(g) => g,
        Err(e) => return fail(&e),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let series = match chief_series(&g, SeriesOrdering::AbelianHigh, &mut rng) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let report = ChiefReport::new(&a.spec, &g, &series);
    if a.json {
        println!("{}", report.to_json_line());
        return 0;
    }
    println!("order = {}", report.order);
    if report.factors.is_empty() {
        println!("trivial group: no chief factors");
        return 0;
    }
    println!("chief factors (bottom-up):");
    for (i, f) in report.factors.iter().enumerate() {
        let shape = match (f.p, f.l) {
            (Some(p), Some(l)) => format!("= {p}^{l} (abelian)"),
            _ => "(non-abelian)".to_string(),
        };
        println!(
            "  {}: order {} {}  delta' = {}  t' = {}",
            i + 1,
            f.order,
            shape,
            f.delta_prime,
            f.t_prime
        );
    }
    0
}

fn run_order(a: &OrderArgs) -> i32 {
    match build(&a.spec) {
        Ok(g) => {
            println!("{}", g.order());
            0
        }
        Err(e) => fail(&e),
    }
}

struct BenchRow {
    spec: String,
    degree: usize,
    d: usize,
    certified: bool,
    seed: u64,
    wall_ms: f64,
    tests: u64,
}

fn run_bench(a: &BenchArgs) -> i32 {
    let (entries, fast_paths): (Vec<String>, bool) = match a.suite {
        SuiteArg::PaperTable => (
            [
                "direct_power(alt(5),19)",
                "direct_power(alt(5),20)",
                "direct_power(psl_3_2,2)",
                "crown_inversion(3,30)",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
            true,
        ),
        SuiteArg::Scaling => {
            let max_degree = a.max_degree.unwrap_or(95);
            (
                (1..=19)
                    .filter(|k| 5 * k <= max_degree)
                    .map(|k| format!("direct_power(alt(5),{k})"))
                    .collect(),
                false,
            )
        }
    };
    let mut opts = MinGenOptions {
        use_fast_paths: fast_paths,
        ..MinGenOptions::default()
    };
    if let Err(code) = apply_env_cap(&mut opts) {
        return code;
    }
    let mut rows: Vec<BenchRow> = Vec::new();
    for spec in &entries {
        let g = match build(spec) {
            Ok(g) => g,
            Err(e) => return fail(&e),
        };
        if matches!(a.suite, SuiteArg::PaperTable) {
            if let Some(max) = a.max_degree {
                if g.degree() > max {
                    continue;
                }
            }
        }
        for j in 0..a.runs {
            let seed = a.seed + j;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let start = Instant::now();
            let res = match min_generating_set(&g, &opts, &mut rng) {
                Ok(res) => res,
                Err(e) => return fail(&e),
            };
            let wall_ms = start.elapsed().as_secs_f64() * 1000.0;
            if a.json {
                let report = SolveReport::new(spec, &g, &res, opts.mode, seed);
                println!("{}", report.to_json_line());
            }
            rows.push(BenchRow {
                spec: spec.clone(),
                degree: g.degree(),
                d: res.d,
                certified: res.certified_minimal,
                seed,
                wall_ms,
                tests: res.stats.ss_tests + res.stats.rss_tests,
            });
        }
    }
    let table = render_bench_table(a, &rows);
    if a.json {
        eprint!("{table}");
    } else {
        print!("{table}");
    }
    0
}

fn render_bench_table(a: &BenchArgs, rows: &[BenchRow]) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let suite = match a.suite {
        SuiteArg::PaperTable => "paper-table",
        SuiteArg::Scaling => "scaling (fast paths off)",
    };
    let _ = writeln!(out, "suite: {suite}, runs = {}, base seed = {}", a.runs, a.seed);
    let wide = rows.iter().map(|r| r.spec.len()).max().unwrap_or(5).max(5);
    let _ = writeln!(
        out,
        "{:<wide$}  {:>6}  {:>2}  {:>9}  {:>5}  {:>9}  {:>7}",
        "group", "degree", "d", "certified", "seed", "wall_ms", "tests"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<wide$}  {:>6}  {:>2}  {:>9}  {:>5}  {:>9.1}  {:>7}",
            r.spec,
            r.degree,
            r.d,
            if r.certified { "yes" } else { "no" },
            r.seed,
            r.wall_ms,
            r.tests
        );
    }
    if matches!(a.suite, SuiteArg::Scaling) {
        let c = rows
            .iter()
            .filter(|r| r.degree >= 2)
            .map(|r| {
                let n = r.degree as f64;
                r.tests as f64 / (n * n * n.ln())
            })
            .fold(0.0_f64, f64::max);
        let _ = writeln!(out, "fitted C: tests <= C * n^2 * ln n with C = {c:.4}");
    }
    out
}
