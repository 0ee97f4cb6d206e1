//! Command-line surface: check interpolation problems, print reduction
//! chains, compute generic bases, and regenerate the result tables.

use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hermite_core::bounds::{self, MixedCounts, SearchConfig};
use hermite_core::diagrams::StaircaseDiagram;
use hermite_core::enumerate::{self, DiagramFilter};
use hermite_core::interp::{self, InterpProblem, RunConfig, Verdict, VerdictKind, VerdictRecord};
use hermite_core::reduction::{self, VSequence};

#[derive(Parser)]
#[command(
    name = "hermite",
    version,
    about = "Generic Hermite interpolation on staircase diagrams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// RNG seed for node sampling.
    #[arg(long, global = true, env = "HERMITE_SEED", default_value_t = 0)]
    seed: u64,
    /// Certification prime (must exceed the degree bound of the problem).
    #[arg(long, global = true, env = "HERMITE_PRIME", default_value_t = hermite_core::DEFAULT_PRIME)]
    prime: u64,
    /// Number of random evaluations before a negative verdict.
    #[arg(long, global = true, env = "HERMITE_TRIALS", default_value_t = 8)]
    trials: u32,
    /// Matrix-size cap for the exact symbolic fallback.
    #[arg(
        long,
        global = true,
        env = "HERMITE_EXACT_THRESHOLD",
        default_value_t = 8
    )]
    exact_threshold: usize,
    /// Subset/verification budget.
    #[arg(
        long,
        global = true,
        env = "HERMITE_BUDGET",
        default_value_t = 10_000_000
    )]
    budget: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "HERMITE_JOBS", default_value_t = 0)]
    jobs: usize,
    /// Output format.
    #[arg(long, global = true, env = "HERMITE_FORMAT", value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Verdict cache file (JSON lines, append-only).
    #[arg(long, global = true, env = "HERMITE_CACHE")]
    cache: Option<PathBuf>,
    /// Enable full-scale enumerations beyond desk scale.
    #[arg(long, global = true, env = "HERMITE_FULL", default_value_t = false)]
    full: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Decide generic correctness of an interpolation problem.
    Check {
        /// Conditions, e.g. "F2x5" or "F1x2+F3x4" (k nodes of order d each).
        #[arg(long)]
        nodes: String,
        /// Use the 1-step diagram of matching cardinality as the basis.
        #[arg(long, conflicts_with = "basis")]
        onestep: bool,
        /// Explicit basis diagram in type syntax, e.g. "(~5,3)".
        #[arg(long)]
        basis: Option<String>,
    },
    /// Print the canonical reduction chain of a diagram.
    Reduce {
        /// Diagram in type syntax, e.g. "(~4,2)".
        diagram: String,
        /// Reduction order d.
        #[arg(short, long)]
        d: u32,
        /// Custom v-sequence for the first step, e.g. "1,3,2".
        #[arg(short, long)]
        v: Option<String>,
        /// Stop cardinality (default: reduce as far as possible).
        #[arg(long)]
        stop: Option<u64>,
    },
    /// Compute the generic term basis for a condition sequence.
    Basis {
        #[arg(long)]
        nodes: String,
    },
    /// List d-diagrams for a node count.
    Enumerate {
        #[arg(short, long)]
        d: u32,
        #[arg(long)]
        nodes: u32,
        /// Filter: all, proper, or safely-proper.
        #[arg(long, default_value = "proper")]
        filter: String,
        /// Print only the count.
        #[arg(long)]
        count: bool,
    },
    /// Regenerate result tables.
    Tables {
        #[command(subcommand)]
        which: TableKind,
    },
}

#[derive(Subcommand)]
enum TableKind {
    /// Proper d-diagram counts: one row per d.
    Counts {
        #[arg(long, default_value = "2..9")]
        d: String,
        #[arg(long, default_value_t = 6)]
        nodes: u32,
        /// Filter: all, proper, or safely-proper.
        #[arg(long, default_value = "proper")]
        filter: String,
    },
    /// Exact r(m,k) values via exhaustive search.
    Rmk {
        #[arg(long, default_value_t = 3)]
        max: u32,
    },
    /// Closed-form upper bounds on r(m,k).
    RmkBounds {
        #[arg(long, default_value_t = 7)]
        max: u32,
    },
    /// Exceptional mixed triples for orders up to 3.
    Triples,
}

fn run_config(c: &Common) -> Result<RunConfig> {
    if c.prime <= (1 << 31) || !hermite_core::modp::is_prime(c.prime) {
        bail!("--prime must be a prime above 2^31, got {}", c.prime);
    }
    if c.trials == 0 {
        bail!("--trials must be at least 1");
    }
    Ok(RunConfig {
        prime: c.prime,
        trials: c.trials,
        exact_threshold: c.exact_threshold,
        exact_var_cap: 4,
        seed: c.seed,
        budget: c.budget,
    })
}

/// Parses "F2x5+F1x3" into condition multiplicities by order.
fn parse_nodes(spec: &str) -> Result<MixedCounts> {
    let mut counts: Vec<u64> = Vec::new();
    for part in spec.split('+') {
        let part = part.trim();
        let rest = part
            .strip_prefix('F')
            .ok_or_else(|| anyhow!("bad node spec: {part:?} (expected F<d>x<k>)"))?;
        let (d, k) = rest
            .split_once('x')
            .ok_or_else(|| anyhow!("bad node spec: {part:?} (expected F<d>x<k>)"))?;
        let d: usize = d.parse().context("order in node spec")?;
        let k: u64 = k.parse().context("count in node spec")?;
        if d == 0 {
            bail!("order must be positive in {part:?}");
        }
        if counts.len() < d {
            counts.resize(d, 0);
        }
        counts[d - 1] += k;
    }
    Ok(MixedCounts(counts))
}

fn cache_lookup(path: &Option<PathBuf>, hash: &str) -> Option<VerdictRecord> {
    let path = path.as_ref()?;
    let file = std::fs::File::open(path).ok()?;
    for line in BufReader::new(file).lines().map_while(|l| l.ok()) {
        if let Ok(rec) = serde_json::from_str::<VerdictRecord>(&line) {
            if rec.problem == hash {
                return Some(rec);
            }
        }
    }
    None
}

fn cache_append(path: &Option<PathBuf>, record: &VerdictRecord) -> Result<()> {
    let Some(path) = path else { return Ok(()) };
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    writeln!(f, "{}", serde_json::to_string(record)?)?;
    Ok(())
}

fn print_verdict(v: &Verdict, hash: &str, format: Format, cached: bool) {
    match format {
        Format::Json => {
            let mut value = serde_json::to_value(v.record(hash)).unwrap();
            value["cached"] = serde_json::Value::Bool(cached);
            println!("{}", serde_json::to_string(&value).unwrap());
        }
        _ => {
            let suffix = if cached { " (cached)" } else { "" };
            match v.kind {
                VerdictKind::CertifiedCorrect => {
                    println!("certified-correct after {} trial(s){}", v.trials, suffix)
                }
                VerdictKind::CertifiedIncorrect => {
                    println!(
                        "certified-incorrect (determinant identically zero; {} trials){}",
                        v.trials, suffix
                    )
                }
                VerdictKind::ProbablyIncorrect => {
                    let eb = v
                        .error_bound
                        .as_ref()
                        .map(|b| format!("{b}"))
                        .unwrap_or_default();
                    println!(
                        "probably-incorrect after {} trials (error bound {}){}",
                        v.trials, eb, suffix
                    )
                }
            }
        }
    }
}

fn exit_for(kind: VerdictKind) -> ExitCode {
    match kind {
        VerdictKind::CertifiedCorrect => ExitCode::SUCCESS,
        VerdictKind::CertifiedIncorrect => ExitCode::from(2),
        VerdictKind::ProbablyIncorrect => ExitCode::from(3),
    }
}

fn cmd_check(common: &Common, nodes: &str, onestep: bool, basis: Option<&str>) -> Result<ExitCode> {
    let counts = parse_nodes(nodes)?;
    if counts.is_zero() {
        bail!("empty condition set");
    }
    let basis_diagram = match basis {
        Some(b) => StaircaseDiagram::from_str(b).map_err(|e| anyhow!("basis: {e}"))?,
        None => {
            if !onestep {
                bail!("specify --onestep or --basis");
            }
            StaircaseDiagram::one_step(counts.cardinality())
        }
    };
    if basis_diagram.cardinality() != counts.cardinality() {
        bail!(
            "basis cardinality {} does not match condition count {}",
            basis_diagram.cardinality(),
            counts.cardinality()
        );
    }
    let problem = InterpProblem::new(counts.conditions(), basis_diagram.points())?;
    let hash = problem.hash();
    let config = run_config(common)?;
    if let Some(rec) = cache_lookup(&common.cache, &hash) {
        let kind = rec.kind;
        let verdict = Verdict {
            kind,
            trials: rec.trials,
            prime: rec.prime,
            seed: rec.seed,
            degree_bound: rec.degree_bound,
            error_bound: None,
            witness: rec.witness,
        };
        print_verdict(&verdict, &hash, common.format, true);
        return Ok(exit_for(kind));
    }
    let verdict = interp::is_generically_correct(&problem, &config)?;
    cache_append(&common.cache, &verdict.record(&hash))?;
    print_verdict(&verdict, &hash, common.format, false);
    Ok(exit_for(verdict.kind))
}

fn cmd_reduce(diagram: &str, d: u32, v: Option<&str>, stop: Option<u64>) -> Result<ExitCode> {
    let start = StaircaseDiagram::from_str(diagram).map_err(|e| anyhow!("diagram: {e}"))?;
    let t = hermite_core::triangle(d);
    let mut steps = Vec::new();
    let mut cur = start.clone();

    if let Some(vspec) = v {
        let entries: Vec<u32> = vspec
            .split(',')
            .map(|x| x.trim().parse().context("v entry"))
            .collect::<Result<_>>()?;
        let step = reduction::reduce(&cur, d, &VSequence(entries))?;
        cur = step.after.clone();
        steps.push(step);
    }

    // Default: reduce down to a single node's worth of conditions.
    let stop = stop.unwrap_or_else(|| {
        let card = cur.cardinality();
        if card % t == 0 && card > 0 {
            t
        } else {
            card % t
        }
    });
    if cur.cardinality() < stop || (cur.cardinality() - stop) % t != 0 {
        bail!(
            "stop cardinality {stop} unreachable from {}",
            cur.cardinality()
        );
    }
    while cur.cardinality() > stop {
        let vseq = reduction::canonical_v(&cur, d)?;
        let step = reduction::reduce(&cur, d, &vseq)?;
        cur = step.after.clone();
        steps.push(step);
    }
    let chain = reduction::ReductionChain {
        d,
        steps,
        terminal: cur,
    };
    println!("{}", chain.arrow_line());
    Ok(ExitCode::SUCCESS)
}

fn cmd_basis(common: &Common, nodes: &str) -> Result<ExitCode> {
    let counts = parse_nodes(nodes)?;
    if counts.is_zero() {
        bail!("empty condition set");
    }
    let config = run_config(common)?;
    let (basis, verdict) = interp::generic_basis(&counts.conditions(), &config)?;
    match common.format {
        Format::Json => {
            let value = serde_json::json!({
                "basis": basis.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
                "verdict": format!("{}", verdict.kind),
            });
            println!("{}", serde_json::to_string(&value).unwrap());
        }
        _ => {
            let parts: Vec<String> = basis.iter().map(|m| m.to_string()).collect();
            println!("{}", parts.join(" "));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_filter(s: &str) -> Result<DiagramFilter> {
    Ok(match s {
        "all" => DiagramFilter::All,
        "proper" => DiagramFilter::Proper,
        "safely-proper" | "safelyProper" => DiagramFilter::SafelyProper,
        other => bail!("unknown filter {other:?}"),
    })
}

fn cmd_enumerate(d: u32, nodes: u32, filter: &str, count_only: bool) -> Result<ExitCode> {
    let filter = parse_filter(filter)?;
    if count_only {
        println!("{}", enumerate::count_d_diagrams(d, nodes, filter));
    } else {
        for f in enumerate::enumerate_d_diagrams(d, nodes, filter) {
            println!("{f}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Triangular m-by-k table: aligned text rows, or `m,k,value` CSV lines.
fn print_triangular(format: Format, header: &str, rows: &[Vec<u64>]) {
    match format {
        Format::Csv | Format::Json => {
            println!("m,k,{header}");
            for (m, row) in rows.iter().enumerate() {
                for (k, v) in row.iter().enumerate() {
                    println!("{m},{k},{v}");
                }
            }
        }
        Format::Text => {
            let width = rows
                .iter()
                .flat_map(|r| r.iter())
                .map(|v| v.to_string().len())
                .max()
                .unwrap_or(1);
            for (m, row) in rows.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:>width$}")).collect();
                println!("m={m:<2} {}", cells.join(" "));
            }
        }
    }
}

fn parse_range(s: &str) -> Result<(u32, u32)> {
    if let Some((a, b)) = s.split_once("..") {
        Ok((a.parse()?, b.parse()?))
    } else {
        let v: u32 = s.parse()?;
        Ok((v, v))
    }
}

fn cmd_tables(common: &Common, which: &TableKind) -> Result<ExitCode> {
    match which {
        TableKind::Counts { d, nodes, filter } => {
            let (lo, hi) = parse_range(d)?;
            let filter = parse_filter(filter)?;
            let cap = if common.full { u32::MAX } else { 9 };
            if common.format == Format::Csv || common.format == Format::Text {
                println!("d,k,count");
            }
            for dd in lo..=hi {
                if dd > cap {
                    println!("{dd},{nodes},skipped");
                    continue;
                }
                let n = enumerate::count_d_diagrams(dd, *nodes, filter);
                println!("{dd},{nodes},{n}");
            }
        }
        TableKind::Rmk { max } => {
            if *max > 3 && !common.full {
                bail!("rows above m=3 require --full");
            }
            let cfg = SearchConfig {
                run: run_config(common)?,
                ceilings: None,
                budget: common.budget,
            };
            let mut rows = Vec::new();
            for m in 0..=*max {
                let exceptions = bounds::exceptional_vectors(m, &cfg)?;
                let row: Vec<u64> = (0..=m)
                    .map(|k| exceptions.iter().map(|v| v[k as usize]).max().unwrap_or(0))
                    .collect();
                rows.push(row);
            }
            print_triangular(common.format, "r", &rows);
        }
        TableKind::RmkBounds { max } => {
            let mut rows = Vec::new();
            for m in 0..=*max {
                let row: Vec<u64> = (0..=m.min(12))
                    .map(|k| bounds::r_bound(m, k).unwrap())
                    .collect();
                rows.push(row);
            }
            print_triangular(common.format, "bound", &rows);
        }
        TableKind::Triples => {
            let config = run_config(common)?;
            let triples = bounds::exceptional_mixed_triples(&config)?;
            match common.format {
                Format::Json => println!("{}", serde_json::to_string(&triples)?),
                _ => {
                    for t in &triples {
                        println!("({},{},{})", t[0], t[1], t[2]);
                    }
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.common.jobs > 0 {
        rayon_set_threads(cli.common.jobs);
    }
    let result = match &cli.command {
        Command::Check {
            nodes,
            onestep,
            basis,
        } => cmd_check(&cli.common, nodes, *onestep, basis.as_deref()),
        Command::Reduce {
            diagram,
            d,
            v,
            stop,
        } => cmd_reduce(diagram, *d, v.as_deref(), *stop),
        Command::Basis { nodes } => cmd_basis(&cli.common, nodes),
        Command::Enumerate {
            d,
            nodes,
            filter,
            count,
        } => cmd_enumerate(*d, *nodes, filter, *count),
        Command::Tables { which } => cmd_tables(&cli.common, which),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn rayon_set_threads(n: usize) {
    let _ = hermite_core::build_thread_pool(n);
}
