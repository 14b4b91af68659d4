//! Experiment loops: random degradation sweeps and routing runtime scaling.

use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{analyze_a2a, analyze_rp, analyze_sp, Pattern, SpOrder};
use crate::error::TopologyError;
use crate::preprocess::Preprocessed;
use crate::router::Algorithm;
use crate::topology::{check_amount, removable_count, EquipmentKind, PgftParams, Topology, UuidMode};

/// Shifted log-uniform degradation amount, `⌊2^(m·u) − 1⌋`, in `[0, 2^m)`
/// for `u` in `[0, 1)` and equal to `2^m − 1` at `u = 1`.
pub fn sample_amount(max_exponent: u32, u: f64) -> u64 {
    assert!((0.0..=1.0).contains(&u), "u must lie in [0, 1], got {u}");
    ((max_exponent as f64 * u).exp2() - 1.0).floor() as u64
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThrowSpec {
    pub max_exponent: u32,
    pub throws: usize,
    pub kind: EquipmentKind,
    pub seed: u64,
    /// Removes exactly this many elements on every throw instead of sampling.
    pub amount: Option<usize>,
}

/// Random draws of one throw. Throw `i` reads stream `i` of a ChaCha8
/// generator keyed by the master seed, in this order: the uniform `u` for the
/// amount, the degradation seed, the RP seed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThrowDraw {
    pub amount: usize,
    pub degrade_seed: u64,
    pub rp_seed: u64,
}

impl ThrowSpec {
    pub fn draw(&self, throw: usize) -> ThrowDraw {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(throw as u64);
        let u: f64 = rng.random();
        let sampled = sample_amount(self.max_exponent, u) as usize;
        ThrowDraw {
            amount: self.amount.unwrap_or(sampled),
            degrade_seed: rng.next_u64(),
            rp_seed: rng.next_u64(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepConfig {
    pub algorithms: Vec<Algorithm>,
    pub patterns: Vec<Pattern>,
    pub rp_samples: usize,
    pub sp_order: SpOrder,
    /// Runs throws concurrently; records come out in throw order either way.
    pub parallel_throws: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            algorithms: Algorithm::ALL.to_vec(),
            patterns: Pattern::ALL.to_vec(),
            rp_samples: 1000,
            sp_order: SpOrder::Nid,
            parallel_throws: false,
        }
    }
}

/// One routing algorithm's outcome on one throw.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRecord {
    pub throw: usize,
    pub kind: EquipmentKind,
    pub amount: usize,
    pub algorithm: Algorithm,
    /// Whether every leaf could still reach every other leaf.
    pub valid: bool,
    pub a2a: Option<u32>,
    pub rp: Option<u32>,
    pub sp: Option<u32>,
    /// Preprocessing plus route computation, in milliseconds.
    pub route_ms: f64,
    pub threads: usize,
    pub error: Option<String>,
}

impl ExperimentRecord {
    pub fn aggregate(&self, pattern: Pattern) -> Option<u32> {
        match pattern {
            Pattern::AllToAll => self.a2a,
            Pattern::RandomPermutation => self.rp,
            Pattern::ShiftPermutation => self.sp,
        }
    }
}

/// Degrades a fresh copy of `base` on every throw and evaluates each
/// algorithm on it. Throws whose fabric lost leaf-to-leaf connectivity are
/// recorded as invalid without aggregates; per-throw failures are recorded
/// in the `error` column and the sweep continues.
pub fn run_sweep(base: &Topology, spec: &ThrowSpec, config: &SweepConfig) -> Result<Vec<ExperimentRecord>, TopologyError> {
    if let Some(amount) = spec.amount {
        check_amount(spec.kind, amount, removable_count(base, spec.kind))?;
    }
    let per_throw = |i: usize| run_throw(base, spec, config, i);
    let records: Vec<Vec<ExperimentRecord>> = if config.parallel_throws {
        (0..spec.throws).into_par_iter().map(per_throw).collect()
    } else {
        (0..spec.throws).map(per_throw).collect()
    };
    Ok(records.into_iter().flatten().collect())
}

fn run_throw(base: &Topology, spec: &ThrowSpec, config: &SweepConfig, throw: usize) -> Vec<ExperimentRecord> {
    let draw = spec.draw(throw);
    let threads = rayon::current_num_threads();
    let blank = |algorithm| ExperimentRecord {
        throw,
        kind: spec.kind,
        amount: draw.amount,
        algorithm,
        valid: false,
        a2a: None,
        rp: None,
        sp: None,
        route_ms: 0.0,
        threads,
        error: None,
    };
    let fail = |msg: String| {
        config
            .algorithms
            .iter()
            .map(|&a| ExperimentRecord {
                error: Some(msg.clone()),
                ..blank(a)
            })
            .collect()
    };

    let topo = match base.degrade(spec.kind, draw.amount, draw.degrade_seed) {
        Ok(t) => t,
        Err(e) => return fail(e.to_string()),
    };
    let start = Instant::now();
    let pre = Preprocessed::run(&topo);
    let preprocess_ms = start.elapsed().as_secs_f64() * 1e3;
    if !pre.validity.is_valid() {
        log::debug!("throw {throw}: {} {} removed, fabric disconnected", draw.amount, spec.kind);
        return config.algorithms.iter().map(|&a| blank(a)).collect();
    }

    config
        .algorithms
        .iter()
        .map(|&algorithm| {
            let start = Instant::now();
            let lft = match algorithm.route(&pre) {
                Ok(lft) => lft,
                Err(e) => {
                    return ExperimentRecord {
                        error: Some(e.to_string()),
                        ..blank(algorithm)
                    }
                }
            };
            let route_ms = preprocess_ms + start.elapsed().as_secs_f64() * 1e3;
            let mut rec = ExperimentRecord {
                valid: true,
                route_ms,
                ..blank(algorithm)
            };
            for &pattern in &config.patterns {
                match pattern {
                    Pattern::AllToAll => rec.a2a = Some(analyze_a2a(&pre, &lft).aggregate),
                    Pattern::RandomPermutation => rec.rp = Some(analyze_rp(&pre, &lft, config.rp_samples, draw.rp_seed).aggregate),
                    Pattern::ShiftPermutation => rec.sp = Some(analyze_sp(&pre, &lft, config.sp_order).aggregate),
                }
            }
            rec
        })
        .collect()
}

pub const SWEEP_HEADER: &str = "throw,kind,amount,algorithm,valid,a2a,rp,sp,error";

/// Sweep records as CSV. Wall-clock columns (`route_ms,threads`) are only
/// appended when `timings` is set, so that default output is reproducible
/// byte for byte.
pub fn sweep_csv(records: &[ExperimentRecord], timings: bool) -> String {
    let mut out = String::from(SWEEP_HEADER);
    if timings {
        out.push_str(",route_ms,threads");
    }
    out.push('\n');
    let opt = |v: Option<u32>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in records {
        let error = r.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
        write!(
            out,
            "{},{},{},{},{},{},{},{},{error}",
            r.throw,
            r.kind,
            r.amount,
            r.algorithm,
            r.valid,
            opt(r.a2a),
            opt(r.rp),
            opt(r.sp)
        )
        .unwrap();
        if timings {
            write!(out, ",{:.3},{}", r.route_ms, r.threads).unwrap();
        }
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub params: PgftParams,
    pub nodes: usize,
    pub switches: usize,
    pub threads: usize,
    pub repetitions: usize,
    pub median_ms: f64,
    pub lft_hash: String,
}

/// Three-level nonblocking PGFT(3; 16.16.k; 1.16.16; 1.1.1) with `256·k`
/// nodes, used for runtime scaling.
pub fn scaling_preset(k: u32) -> PgftParams {
    PgftParams::new(vec![16, 16, k], vec![1, 16, 16], vec![1, 1, 1])
}

/// Median wall time of preprocessing plus Dmodc routing, per topology and
/// worker count. Topology generation is not timed.
pub fn bench_route(params: &[PgftParams], threads: &[usize], repetitions: usize) -> Result<Vec<BenchRecord>, TopologyError> {
    let repetitions = repetitions.max(1);
    let mut out = Vec::new();
    for p in params {
        let topo = p.build(UuidMode::Sequential)?;
        for &k in threads {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(k).build().expect("thread pool");
            let (mut times, mut hash) = (Vec::with_capacity(repetitions), String::new());
            for _ in 0..repetitions {
                let (ms, h) = pool.install(|| {
                    let start = Instant::now();
                    let pre = Preprocessed::run(&topo);
                    let lft = Algorithm::Dmodc.route(&pre).expect("intact PGFTs always route");
                    let ms = start.elapsed().as_secs_f64() * 1e3;
                    (ms, lft.content_hash())
                });
                times.push(ms);
                hash = h;
            }
            times.sort_by(f64::total_cmp);
            out.push(BenchRecord {
                params: p.clone(),
                nodes: topo.node_count(),
                switches: topo.switch_count(),
                threads: k,
                repetitions,
                median_ms: times[(times.len() - 1) / 2],
                lft_hash: hash,
            });
        }
    }
    Ok(out)
}

pub const BENCH_HEADER: &str = "nodes,switches,threads,repetitions,median_ms,lft_hash";

pub fn bench_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(BENCH_HEADER);
    out.push('\n');
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{:.3},{}",
            r.nodes, r.switches, r.threads, r.repetitions, r.median_ms, r.lft_hash
        )
        .unwrap();
    }
    out
}
