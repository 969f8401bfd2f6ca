//! Command-line front end.
//!
//! Subcommands: `poly` (census + quasi-polynomial pair), `count` (one count
//! by one method), `circuits` (cycles, barbells, broken circuits), `verify`
//! (cross-checks between methods and invariances), `minimize` (search over
//! k-list assignments), `switch` (switch and reprint a graph). Output is
//! deterministic given the inputs and seeds.
//!
//! Exit codes: 0 success, 1 usage, 2 unreadable or malformed input,
//! 3 resource cap exceeded, 4 verification mismatch.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuits::{
    broken_circuits, enumerate_barbells, enumerate_cycles, nbc_census, nbc_list_count,
    quasi_polynomial, Circuit, EdgeOrder,
};
use crate::counting::{brute_count_k, brute_count_list, inclusion_exclusion_count, ListAssignment};
use crate::extremal::{minimize_over_assignments, ExtremalError, Mode, SearchConfig, Strategy};
use crate::graph::{EdgeSet, SignedGraph};
use crate::{Caps, EdgeId, ResourceError};

#[derive(Parser)]
#[command(name = "sgchrom", version, about = "Exact coloring counts for signed graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CapsArgs {
    /// Largest m for which 2^m subset enumeration is attempted
    #[arg(long, default_value_t = 20)]
    max_subset_edges: usize,
    /// Largest number of circuits enumerated
    #[arg(long, default_value_t = 100_000)]
    max_circuits: usize,
}

impl CapsArgs {
    fn caps(&self) -> Caps {
        Caps { subset_edges: self.max_subset_edges, circuits: self.max_circuits }
    }
}

#[derive(Args)]
struct OrderArg {
    /// Edge order: a comma-separated permutation of the edge positions,
    /// smallest first (default: input order)
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<usize>>,
}

impl OrderArg {
    fn for_graph(&self, m: usize) -> Result<EdgeOrder, CliError> {
        match &self.order {
            None => Ok(EdgeOrder::identity(m)),
            Some(perm) => {
                if perm.len() != m {
                    return Err(CliError::Usage(format!(
                        "--order lists {} positions but the graph has {m} edges",
                        perm.len()
                    )));
                }
                EdgeOrder::from_permutation(perm).map_err(|e| CliError::Usage(e.to_string()))
            }
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Brute,
    Ie,
    Nbc,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Any,
    ZeroFree,
    ZeroIncluded,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Any => Mode::Any,
            ModeArg::ZeroFree => Mode::ZeroFree,
            ModeArg::ZeroIncluded => Mode::ZeroIncluded,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Broken-circuit census and the chromatic quasi-polynomial pair
    Poly {
        /// Signed graph file
        graph: PathBuf,
        #[command(flatten)]
        order: OrderArg,
        #[command(flatten)]
        caps: CapsArgs,
    },
    /// Count proper or list colorings with one exact method
    Count {
        graph: PathBuf,
        /// Palette size for proper colorings
        #[arg(short, conflicts_with = "list")]
        k: Option<u32>,
        /// List assignment file for list colorings
        #[arg(long)]
        list: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Method::Nbc)]
        method: Method,
        #[command(flatten)]
        order: OrderArg,
        #[command(flatten)]
        caps: CapsArgs,
    },
    /// Enumerate cycles, barbells and broken circuits
    Circuits {
        graph: PathBuf,
        #[command(flatten)]
        order: OrderArg,
        #[command(flatten)]
        caps: CapsArgs,
    },
    /// Cross-check the counting methods and their invariances
    Verify {
        graph: PathBuf,
        /// Largest palette checked against brute force
        #[arg(long, default_value_t = 5)]
        kmax: u32,
        /// Number of random list assignments compared across methods
        #[arg(long, default_value_t = 20)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        caps: CapsArgs,
    },
    /// Search k-list assignments for a count below the canonical one
    Minimize {
        graph: PathBuf,
        /// List size
        #[arg(short)]
        k: u32,
        #[arg(long, value_enum, default_value_t = ModeArg::Any)]
        mode: ModeArg,
        /// Universe bound U: colors are drawn from [-U, U] (default: k)
        #[arg(long)]
        universe: Option<u32>,
        /// Evaluate every candidate assignment (the default)
        #[arg(long, conflicts_with = "random")]
        exhaustive: bool,
        /// Sample this many random assignments instead of exhausting
        #[arg(long)]
        random: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Evaluation budget for the exhaustive strategy
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
        #[command(flatten)]
        caps: CapsArgs,
    },
    /// Switch the graph at a vertex set and print the result
    Switch {
        graph: PathBuf,
        /// Comma-separated vertices to switch at
        #[arg(long, value_delimiter = ',')]
        at: Option<Vec<usize>>,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Input(String),
    Resource(ResourceError),
    Failed { failures: usize },
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Failed { .. } => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Input(msg) => f.write_str(msg),
            CliError::Resource(e) => write!(f, "{e}"),
            CliError::Failed { failures } => write!(f, "verification failed: {failures} check(s)"),
        }
    }
}

impl From<ResourceError> for CliError {
    fn from(e: ResourceError) -> CliError {
        CliError::Resource(e)
    }
}

impl From<ExtremalError> for CliError {
    fn from(e: ExtremalError) -> CliError {
        match e {
            ExtremalError::Resource(r) => CliError::Resource(r),
            other => CliError::Usage(other.to_string()),
        }
    }
}

/// Runs the CLI and returns the process exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn load_graph(path: &Path) -> Result<SignedGraph, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    SignedGraph::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn row<T: fmt::Display>(label: &str, items: impl IntoIterator<Item = T>) -> String {
    let mut s = label.to_string();
    for item in items {
        s.push(' ');
        s.push_str(&item.to_string());
    }
    s
}

fn ids(edges: &[EdgeId]) -> String {
    let inner = edges.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
    format!("[{inner}]")
}

fn set(s: EdgeSet) -> String {
    ids(&s.iter().collect::<Vec<_>>())
}

fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Poly { graph, order, caps } => {
            let g = load_graph(&graph)?;
            let order = order.for_graph(g.m())?;
            let caps = caps.caps();
            let census = nbc_census(&g, &order, &caps)?;
            let qp = quasi_polynomial(&g, &order, &caps)?;
            println!("{}", row("c:", &census.c));
            println!("{}", row("c*:", &census.c_star));
            println!("{}", row("P1:", &qp.odd));
            println!("{}", row("P0:", &qp.even));
            Ok(())
        }
        Command::Count { graph, k, list, method, order, caps } => {
            let g = load_graph(&graph)?;
            let order = order.for_graph(g.m())?;
            let caps = caps.caps();
            let count = match (k, list) {
                (Some(k), None) => {
                    if k < 1 {
                        return Err(CliError::Usage("k must be at least 1".into()));
                    }
                    match method {
                        Method::Brute => brute_count_k(&g, k),
                        Method::Ie => inclusion_exclusion_count(
                            &g,
                            &ListAssignment::uniform(g.n(), k),
                            &caps,
                        )?,
                        Method::Nbc => quasi_polynomial(&g, &order, &caps)?.eval(k as u64),
                    }
                }
                (None, Some(path)) => {
                    let text = fs::read_to_string(&path)
                        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                    let l = ListAssignment::parse(&text, g.n())
                        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                    match method {
                        Method::Brute => brute_count_list(&g, &l),
                        Method::Ie => inclusion_exclusion_count(&g, &l, &caps)?,
                        Method::Nbc => nbc_list_count(&g, &l, &order, &caps)?,
                    }
                }
                _ => return Err(CliError::Usage("give exactly one of -k and --list".into())),
            };
            println!("{count}");
            Ok(())
        }
        Command::Circuits { graph, order, caps } => {
            let g = load_graph(&graph)?;
            let order = order.for_graph(g.m())?;
            let caps = caps.caps();
            let cycles = enumerate_cycles(&g, &caps)?;
            let barbells = enumerate_barbells(&g, &caps)?;
            let bcs = broken_circuits(&g, &order, &caps)?;
            println!("cycles: {}", cycles.len());
            for c in &cycles {
                let kind = if c.balanced { "balanced" } else { "unbalanced" };
                println!("  {} {kind}", ids(&c.edges));
            }
            println!("barbells: {}", barbells.len());
            for b in &barbells {
                println!(
                    "  cycle {} + path {} + cycle {}",
                    ids(&b.cycle1.edges),
                    ids(&b.path),
                    ids(&b.cycle2.edges)
                );
            }
            println!("broken circuits: {}", bcs.broken.len());
            for b in &bcs.broken {
                let source = match &b.source {
                    Circuit::BalancedCycle(c) => format!("cycle {}", set(c.edge_set())),
                    Circuit::Barbell(bb) => format!("barbell {}", set(bb.edge_set())),
                };
                println!("  {} from {source} multiplicity {}", set(b.edges), b.multiplicity);
            }
            println!("minimal broken circuits: {}", bcs.minimal.len());
            for s in &bcs.minimal {
                println!("  {}", set(*s));
            }
            Ok(())
        }
        Command::Verify { graph, kmax, trials, seed, caps } => {
            let g = load_graph(&graph)?;
            cmd_verify(&g, kmax, trials, seed, &caps.caps())
        }
        Command::Minimize { graph, k, mode, universe, exhaustive: _, random, seed, budget, caps } => {
            let g = load_graph(&graph)?;
            if k < 1 {
                return Err(CliError::Usage("k must be at least 1".into()));
            }
            let strategy = match random {
                None => Strategy::Exhaustive,
                Some(0) => {
                    return Err(CliError::Usage("--random needs at least one trial".into()))
                }
                Some(trials) => Strategy::Random { trials, seed },
            };
            let mode = Mode::from(mode);
            let cfg = SearchConfig {
                universe_bound: universe.unwrap_or(k),
                strategy,
                budget: budget as u128,
                ..SearchConfig::new(k, mode)
            };
            let outcome = minimize_over_assignments(&g, &cfg, &caps.caps())?;
            println!("mode: {mode}");
            println!("k: {k}");
            println!("universe: {}", cfg.universe_bound);
            match strategy {
                Strategy::Exhaustive => println!("strategy: exhaustive"),
                Strategy::Random { trials, seed } => {
                    println!("strategy: random trials={trials} seed={seed}")
                }
            }
            println!("evaluated: {}", outcome.evaluated);
            println!("min: {}", outcome.min_count);
            println!("canonical: {}", outcome.canonical_count);
            println!("counterexample: {}", outcome.counterexample_found);
            let truncated = if outcome.minimizers_truncated { " (truncated)" } else { "" };
            println!("minimizers: {}{truncated}", outcome.minimizers.len());
            print!("argmin:\n{}", outcome.argmin);
            Ok(())
        }
        Command::Switch { graph, at } => {
            let g = load_graph(&graph)?;
            let at = at.unwrap_or_default();
            if let Some(&v) = at.iter().find(|&&v| v >= g.n()) {
                return Err(CliError::Usage(format!(
                    "--at vertex {v} out of range for n = {}",
                    g.n()
                )));
            }
            print!("{}", g.switched(&at));
            Ok(())
        }
    }
}

fn random_lists(rng: &mut ChaCha8Rng, n: usize) -> ListAssignment {
    let lists = (0..n)
        .map(|_| {
            let size = rng.random_range(1..=4usize);
            let mut s = BTreeSet::new();
            while s.len() < size {
                s.insert(rng.random_range(-5..=5));
            }
            s
        })
        .collect();
    ListAssignment::new(lists).expect("generated lists are non-empty")
}

fn cmd_verify(
    g: &SignedGraph,
    kmax: u32,
    trials: u64,
    seed: u64,
    caps: &Caps,
) -> Result<(), CliError> {
    let mut failures = 0;
    let order = EdgeOrder::identity(g.m());
    let qp = quasi_polynomial(g, &order, caps)?;
    let census = nbc_census(g, &order, caps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut ok = true;
    for k in 1..=kmax {
        let brute = brute_count_k(g, k);
        let poly = qp.eval(k as u64);
        let ie = inclusion_exclusion_count(g, &ListAssignment::uniform(g.n(), k), caps)?;
        if poly != brute || ie != brute {
            println!(
                "MISMATCH: k = {k}: brute {brute}, polynomial {poly}, inclusion-exclusion {ie}"
            );
            ok = false;
        }
    }
    report(&mut failures, ok, &format!("three methods agree for k = 1..={kmax}"));

    let mut ok = true;
    for t in 0..trials {
        let l = random_lists(&mut rng, g.n());
        let brute = brute_count_list(g, &l);
        let ie = inclusion_exclusion_count(g, &l, caps)?;
        let pruned = nbc_list_count(g, &l, &order, caps)?;
        if ie != brute || pruned != brute {
            println!(
                "MISMATCH: trial {t}: brute {brute}, inclusion-exclusion {ie}, pruned {pruned}\n\
                 lists:\n{l}"
            );
            ok = false;
        }
    }
    report(
        &mut failures,
        ok,
        &format!("three methods agree on {trials} random list assignments (seed {seed})"),
    );

    let mut ok = true;
    for _ in 0..5 {
        let mut perm: Vec<usize> = (0..g.m()).collect();
        perm.shuffle(&mut rng);
        let shuffled = EdgeOrder::from_permutation(&perm).expect("shuffle keeps a permutation");
        if nbc_census(g, &shuffled, caps)? != census {
            println!("MISMATCH: census differs under edge order {perm:?}");
            ok = false;
        }
    }
    report(&mut failures, ok, "census is invariant under 5 random edge orders");

    let mut ok = true;
    for _ in 0..5 {
        let x: Vec<usize> = (0..g.n()).filter(|_| rng.random_bool(0.5)).collect();
        let gx = g.switched(&x);
        if nbc_census(&gx, &order, caps)? != census {
            println!("MISMATCH: census differs after switching at {x:?}");
            ok = false;
        }
        let l = random_lists(&mut rng, g.n());
        let plain = brute_count_list(g, &l);
        let switched = brute_count_list(&gx, &l.switched(&x));
        if plain != switched {
            println!(
                "MISMATCH: count {plain} became {switched} after switching at {x:?}\nlists:\n{l}"
            );
            ok = false;
        }
    }
    report(&mut failures, ok, "counts and census are invariant under 5 random switchings");

    if failures == 0 {
        println!("verify: all checks passed");
        Ok(())
    } else {
        println!("verify: {failures} check(s) failed");
        Err(CliError::Failed { failures })
    }
}

fn report(failures: &mut usize, ok: bool, what: &str) {
    if ok {
        println!("ok: {what}");
    } else {
        *failures += 1;
    }
}
