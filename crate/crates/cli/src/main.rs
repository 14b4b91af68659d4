use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};
use dmodc_core::analysis::{analyze_a2a, analyze_rp, analyze_sp, Pattern, SpOrder, REPORT_HEADER};
use dmodc_core::harness::{bench_csv, bench_route, run_sweep, scaling_preset, sweep_csv, SweepConfig, ThrowSpec};
use dmodc_core::preprocess::Preprocessed;
use dmodc_core::router::{Algorithm, Lft};
use dmodc_core::topology::{EquipmentKind, PgftParams, Topology, UuidMode};

/// Fault-resilient deterministic routing for parallel generalized fat-trees.
#[derive(Parser)]
#[command(name = "dmodc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a PGFT topology file.
    Generate(GenerateArgs),
    /// Remove random switches or links from a topology.
    Degrade(DegradeArgs),
    /// Compute forwarding tables.
    Route(RouteArgs),
    /// Evaluate the congestion risk of forwarding tables.
    Analyze(AnalyzeArgs),
    /// Run a random degradation sweep.
    Sweep(SweepArgs),
    /// Time preprocessing plus routing across sizes and thread counts.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    levels: usize,
    /// Per-level down arities, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    m: Vec<u32>,
    /// Per-level up arities (distinct parents).
    #[arg(long, value_delimiter = ',', required = true)]
    w: Vec<u32>,
    /// Per-level parallel link counts.
    #[arg(long, value_delimiter = ',', required = true)]
    p: Vec<u32>,
    /// Assign UUIDs in a random order drawn from this seed.
    #[arg(long, value_name = "SEED")]
    shuffle_uuids: Option<u64>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct DegradeArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long)]
    kind: EquipmentKind,
    #[arg(long)]
    amount: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct RouteArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, default_value = "dmodc")]
    algo: Algorithm,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(short, long)]
    output: PathBuf,
    /// Also write the cost matrix as CSV.
    #[arg(long)]
    costs: Option<PathBuf>,
    /// Also write the topological node numbering as CSV.
    #[arg(long)]
    nids: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long)]
    lft: PathBuf,
    #[arg(long)]
    pattern: Pattern,
    #[arg(long, default_value_t = 1000)]
    rp_samples: usize,
    #[arg(long, default_value = "nid")]
    sp_order: SpOrder,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    threads: Option<usize>,
    /// Per-port detail of the worst sample.
    #[arg(long)]
    ports: Option<PathBuf>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Base topology file.
    #[arg(short, long, conflicts_with = "pgft", required_unless_present = "pgft")]
    input: Option<PathBuf>,
    /// Base topology as PGFT notation, e.g. `PGFT(3;16.8.8;1.4.8;1.1.1)`.
    #[arg(long)]
    pgft: Option<PgftParams>,
    #[arg(long)]
    max_exponent: u32,
    #[arg(long)]
    throws: usize,
    #[arg(long)]
    kind: EquipmentKind,
    #[arg(long, value_delimiter = ',', default_value = "dmodc,updn")]
    algos: Vec<Algorithm>,
    #[arg(long, value_delimiter = ',', default_value = "a2a,rp,sp")]
    patterns: Vec<Pattern>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    rp_samples: usize,
    #[arg(long, default_value = "nid")]
    sp_order: SpOrder,
    /// Remove exactly this many elements on every throw.
    #[arg(long)]
    amount: Option<usize>,
    /// Append wall-clock columns (makes output non-reproducible).
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    parallel_throws: bool,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Topologies to time; defaults to 1k to 16k node three-level PGFTs.
    #[arg(long)]
    pgft: Vec<PgftParams>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    threads: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    repetitions: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Degrade(a) => degrade(a),
        Command::Route(a) => with_threads(a.threads, || route(&a)),
        Command::Analyze(a) => with_threads(a.threads, || analyze(&a)),
        Command::Sweep(a) => with_threads(a.threads, || sweep(&a)),
        Command::Bench(a) => bench(a),
    }
}

fn with_threads<T>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T>
where
    T: Send,
{
    match threads {
        None => f(),
        Some(k) => {
            ensure!(k >= 1, "--threads must be at least 1");
            rayon::ThreadPoolBuilder::new().num_threads(k).build()?.install(f)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_topology(path: &Path) -> Result<Topology> {
    Topology::load(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn generate(a: GenerateArgs) -> Result<()> {
    ensure!(
        a.m.len() == a.levels && a.w.len() == a.levels && a.p.len() == a.levels,
        "--m, --w and --p need exactly {} values each (got {}, {}, {})",
        a.levels,
        a.m.len(),
        a.w.len(),
        a.p.len()
    );
    let params = PgftParams::new(a.m, a.w, a.p);
    let mode = a.shuffle_uuids.map_or(UuidMode::Sequential, UuidMode::Shuffled);
    let topo = params.build(mode)?;
    log::info!("{params}: {} nodes, {} switches", topo.node_count(), topo.switch_count());
    write(&a.output, &topo.save())
}

fn degrade(a: DegradeArgs) -> Result<()> {
    let topo = load_topology(&a.input)?.degrade(a.kind, a.amount, a.seed)?;
    write(&a.output, &topo.save())
}

fn route(a: &RouteArgs) -> Result<()> {
    let topo = load_topology(&a.input)?;
    let pre = Preprocessed::run(&topo);
    if !pre.validity.is_valid() {
        log::warn!("some leaves cannot reach each other; their entries are written as -1");
    }
    if let Some(path) = &a.costs {
        write(path, &pre.costs_csv())?;
    }
    if let Some(path) = &a.nids {
        write(path, &pre.nids_csv())?;
    }
    let lft = a.algo.route(&pre)?;
    write(&a.output, &lft.dump())
}

fn analyze(a: &AnalyzeArgs) -> Result<()> {
    let topo = load_topology(&a.input)?;
    let pre = Preprocessed::run(&topo);
    let lft = Lft::from_dump(&read(&a.lft)?, &pre.fabric).with_context(|| format!("parsing {}", a.lft.display()))?;
    let report = match a.pattern {
        Pattern::AllToAll => analyze_a2a(&pre, &lft),
        Pattern::RandomPermutation => {
            ensure!(a.rp_samples >= 1, "--rp-samples must be at least 1");
            analyze_rp(&pre, &lft, a.rp_samples, a.seed)
        }
        Pattern::ShiftPermutation => {
            ensure!(pre.nids.len() >= 2, "shift permutations need at least two nodes");
            analyze_sp(&pre, &lft, a.sp_order)
        }
    };
    if report.invalid_flows > 0 {
        log::warn!("{} flows hit a missing or inconsistent table entry", report.invalid_flows);
    }
    if let Some(path) = &a.ports {
        write(path, &report.ports_csv(&pre.fabric))?;
    }
    write(&a.output, &format!("{REPORT_HEADER}\n{}\n", report.csv_row()))
}

fn sweep(a: &SweepArgs) -> Result<()> {
    let base = match (&a.input, &a.pgft) {
        (Some(path), _) => load_topology(path)?,
        (None, Some(params)) => params.build(UuidMode::Sequential)?,
        (None, None) => bail!("either --input or --pgft is required"),
    };
    if a.patterns.contains(&Pattern::RandomPermutation) {
        ensure!(a.rp_samples >= 1, "--rp-samples must be at least 1");
    }
    let spec = ThrowSpec {
        max_exponent: a.max_exponent,
        throws: a.throws,
        kind: a.kind,
        seed: a.seed,
        amount: a.amount,
    };
    let config = SweepConfig {
        algorithms: a.algos.clone(),
        patterns: a.patterns.clone(),
        rp_samples: a.rp_samples,
        sp_order: a.sp_order,
        parallel_throws: a.parallel_throws,
    };
    let records = run_sweep(&base, &spec, &config)?;
    write(&a.output, &sweep_csv(&records, a.timings))
}

fn bench(a: BenchArgs) -> Result<()> {
    ensure!(a.threads.iter().all(|&k| k >= 1), "--threads values must be at least 1");
    let params = if a.pgft.is_empty() {
        [4, 8, 16, 32, 64].map(scaling_preset).to_vec()
    } else {
        a.pgft
    };
    let csv = bench_csv(&bench_route(&params, &a.threads, a.repetitions)?);
    match &a.output {
        Some(path) => write(path, &csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}
