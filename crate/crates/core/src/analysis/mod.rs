//! Static congestion risk of forwarding tables: for every directed port,
//! `min(#distinct sources, #distinct destinations)` over the flows crossing
//! it, aggregated over all-to-all, random and shift permutation patterns.

mod walk;

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::preprocess::{Fabric, NidMap, Preprocessed};
use crate::router::Lft;
use walk::{tally_keys, Scratch, Tally, Walker};

/// One communication, between NIDs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flow {
    pub src: u32,
    pub dst: u32,
}

/// Distinct-endpoint counters per directed port (see
/// [`Fabric::directed_port_count`]).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PortLoad {
    pub srcs: Vec<u32>,
    pub dsts: Vec<u32>,
    pub valid_flows: u64,
    /// Flows whose walk failed; they contribute to no port.
    pub invalid: Vec<Flow>,
}

impl PortLoad {
    pub fn risk(&self, port: u32) -> u32 {
        self.srcs[port as usize].min(self.dsts[port as usize])
    }

    pub fn max_risk(&self) -> u32 {
        (0..self.srcs.len() as u32).map(|p| self.risk(p)).max().unwrap_or(0)
    }

    /// `(port id, srcs, dsts)` for every port some flow crosses.
    pub fn used_ports(&self) -> impl Iterator<Item = (u32, u32, u32)> + '_ {
        self.srcs
            .iter()
            .zip(&self.dsts)
            .enumerate()
            .filter(|(_, (&s, &d))| s > 0 || d > 0)
            .map(|(p, (&s, &d))| (p as u32, s, d))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pattern {
    AllToAll,
    RandomPermutation,
    ShiftPermutation,
}

impl Pattern {
    pub const ALL: [Pattern; 3] = [Pattern::AllToAll, Pattern::RandomPermutation, Pattern::ShiftPermutation];
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pattern::AllToAll => "a2a",
            Pattern::RandomPermutation => "rp",
            Pattern::ShiftPermutation => "sp",
        })
    }
}

impl FromStr for Pattern {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a2a" => Ok(Pattern::AllToAll),
            "rp" => Ok(Pattern::RandomPermutation),
            "sp" => Ok(Pattern::ShiftPermutation),
            other => Err(format!("unknown pattern `{other}` (expected a2a, rp or sp)")),
        }
    }
}

/// Node ordering in which shift permutations are taken.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum SpOrder {
    #[default]
    Nid,
    Uuid,
}

impl fmt::Display for SpOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpOrder::Nid => "nid",
            SpOrder::Uuid => "uuid",
        })
    }
}

impl FromStr for SpOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nid" => Ok(SpOrder::Nid),
            "uuid" => Ok(SpOrder::Uuid),
            other => Err(format!("unknown shift ordering `{other}` (expected nid or uuid)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongestionReport {
    pub pattern: Pattern,
    pub seed: Option<u64>,
    /// Permutations evaluated: 1 for A2A, RP samples, or SP shifts.
    pub samples: usize,
    pub aggregate: u32,
    /// Flow tallies summed over all samples.
    pub valid_flows: u64,
    pub invalid_flows: u64,
    /// Maximum port risk of each sample, in sample order.
    pub sample_maxima: Vec<u32>,
    /// Port counters of the first sample reaching the overall maximum.
    pub worst: PortLoad,
}

pub const REPORT_HEADER: &str = "pattern,seed,samples,aggregate,valid_flows,invalid_flows";
pub const PORTS_HEADER: &str = "switch_uuid,port,srcs,dsts,risk";

impl CongestionReport {
    /// One CSV row matching [`REPORT_HEADER`]; the seed is empty for
    /// unseeded patterns.
    pub fn csv_row(&self) -> String {
        let seed = self.seed.map(|s| s.to_string()).unwrap_or_default();
        format!(
            "{},{seed},{},{},{},{}",
            self.pattern, self.samples, self.aggregate, self.valid_flows, self.invalid_flows
        )
    }

    /// Per-port detail of the worst sample. Node egress ports are listed
    /// under the node's UUID with port 0.
    pub fn ports_csv(&self, fabric: &Fabric) -> String {
        let mut out = String::from(PORTS_HEADER);
        out.push('\n');
        for (port, s, d) in self.worst.used_ports() {
            let (uuid, local) = fabric.describe_port(port);
            writeln!(out, "{uuid},{local},{s},{d},{}", s.min(d)).unwrap();
        }
        out
    }
}

/// Counts distinct sources and destinations per port for `flows`.
/// Flows with `src == dst` are ignored.
pub fn route_flows(fabric: &Fabric, lft: &Lft, nids: &NidMap, flows: &[Flow]) -> PortLoad {
    let w = Walker { fabric, lft, nids };
    let mut flows: Vec<Flow> = flows.iter().copied().filter(|f| f.src != f.dst).collect();
    flows.sort_unstable();
    flows.dedup();
    let by_src = Csr::build(nids.len(), flows.iter().map(|f| (f.src, f.dst)));
    let by_dst = Csr::build(nids.len(), flows.iter().map(|f| (f.dst, f.src)));

    let mut scratch = Scratch::new(w.port_count());
    let mut srcs = Tally::new(w.port_count());
    tally_keys(
        &w,
        0..nids.len() as u32,
        true,
        &|k, out| out.extend_from_slice(by_src.row(k)),
        &mut scratch,
        &mut srcs,
    );
    let mut scratch = Scratch::new(w.port_count());
    let mut dsts = Tally::new(w.port_count());
    tally_keys(
        &w,
        0..nids.len() as u32,
        false,
        &|k, out| out.extend_from_slice(by_dst.row(k)),
        &mut scratch,
        &mut dsts,
    );

    let mut path = Vec::new();
    let invalid = if srcs.invalid == 0 {
        Vec::new()
    } else {
        flows.into_iter().filter(|f| !w.walk(f.src, f.dst, &mut path)).collect()
    };
    PortLoad {
        srcs: srcs.counts,
        dsts: dsts.counts,
        valid_flows: srcs.valid,
        invalid,
    }
}

/// Maximum risk over ports for every ordered pair of distinct nodes.
pub fn analyze_a2a(pre: &Preprocessed, lft: &Lft) -> CongestionReport {
    let w = Walker {
        fabric: &pre.fabric,
        lft,
        nids: &pre.nids,
    };
    let n = pre.nids.len() as u32;
    let others = move |k: u32, out: &mut Vec<u32>| out.extend((0..n).filter(|&o| o != k));
    let srcs = parallel_pass(&w, n, true, &others);
    let dsts = parallel_pass(&w, n, false, &others);
    let worst = PortLoad {
        srcs: srcs.counts,
        dsts: dsts.counts,
        valid_flows: srcs.valid,
        invalid: Vec::new(),
    };
    let max = worst.max_risk();
    CongestionReport {
        pattern: Pattern::AllToAll,
        seed: None,
        samples: 1,
        aggregate: max,
        valid_flows: srcs.valid,
        invalid_flows: srcs.invalid,
        sample_maxima: vec![max],
        worst,
    }
}

/// Uniform random permutation of `n` NIDs for sample `sample` of `seed`:
/// ChaCha8 seeded with `seed`, stream `sample`, Fisher–Yates shuffle.
pub fn rp_permutation(n: usize, seed: u64, sample: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample);
    let mut perm: Vec<u32> = (0..n as u32).collect();
    perm.shuffle(&mut rng);
    perm
}

/// Median (lower middle for even counts) over `samples` random
/// permutations of the per-sample maximum risk.
pub fn analyze_rp(pre: &Preprocessed, lft: &Lft, samples: usize, seed: u64) -> CongestionReport {
    assert!(samples >= 1, "at least one sample");
    let n = pre.nids.len();
    let perms = move |i: usize| {
        let perm = rp_permutation(n, seed, i as u64);
        (0..n as u32)
            .filter(|&s| perm[s as usize] != s)
            .map(|s| Flow {
                src: s,
                dst: perm[s as usize],
            })
            .collect::<Vec<_>>()
    };
    let mut report = permutation_family(pre, lft, samples, &perms);
    let mut sorted = report.sample_maxima.clone();
    sorted.sort_unstable();
    report.aggregate = sorted[(samples - 1) / 2];
    report.pattern = Pattern::RandomPermutation;
    report.seed = Some(seed);
    report
}

/// Maximum over the `#N − 1` shifts `i → i + k (mod #N)` of the maximum
/// port risk, positions taken in NID or node-UUID order.
pub fn analyze_sp(pre: &Preprocessed, lft: &Lft, order: SpOrder) -> CongestionReport {
    let n = pre.nids.len();
    assert!(n >= 2, "shift permutations need at least two nodes");
    // NID at each position; fabric node indices follow UUID order
    let at: Vec<u32> = match order {
        SpOrder::Nid => (0..n as u32).collect(),
        SpOrder::Uuid => (0..n as u32).map(|node| pre.nids.nid(node)).collect(),
    };
    let shifts = |i: usize| {
        let k = i + 1;
        (0..n)
            .map(|pos| Flow {
                src: at[pos],
                dst: at[(pos + k) % n],
            })
            .collect::<Vec<_>>()
    };
    let mut report = permutation_family(pre, lft, n - 1, &shifts);
    report.aggregate = report.sample_maxima.iter().copied().max().unwrap_or(0);
    report.pattern = Pattern::ShiftPermutation;
    report
}

/// Evaluates `count` flow sets in parallel; aggregate is left at the max.
fn permutation_family(pre: &Preprocessed, lft: &Lft, count: usize, flows_of: &(dyn Fn(usize) -> Vec<Flow> + Sync)) -> CongestionReport {
    let per_sample: Vec<(u32, u64, u64)> = (0..count)
        .into_par_iter()
        .map(|i| {
            let load = route_flows(&pre.fabric, lft, &pre.nids, &flows_of(i));
            (load.max_risk(), load.valid_flows, load.invalid.len() as u64)
        })
        .collect();
    let sample_maxima: Vec<u32> = per_sample.iter().map(|x| x.0).collect();
    let max = sample_maxima.iter().copied().max().unwrap_or(0);
    let worst_index = sample_maxima.iter().position(|&m| m == max).unwrap_or(0);
    let worst = route_flows(&pre.fabric, lft, &pre.nids, &flows_of(worst_index));
    CongestionReport {
        pattern: Pattern::ShiftPermutation,
        seed: None,
        samples: count,
        aggregate: max,
        valid_flows: per_sample.iter().map(|x| x.1).sum(),
        invalid_flows: per_sample.iter().map(|x| x.2).sum(),
        sample_maxima,
        worst,
    }
}

/// Splits the keys into contiguous chunks handled by independent workers.
/// Chunks hold disjoint keys, so summing their distinct counts is exact.
fn parallel_pass(w: &Walker<'_>, n: u32, key_is_src: bool, partners: &(dyn Fn(u32, &mut Vec<u32>) + Sync)) -> Tally {
    let chunk = (n as usize / (4 * rayon::current_num_threads())).max(1) as u32;
    let starts: Vec<u32> = (0..n).step_by(chunk as usize).collect();
    starts
        .into_par_iter()
        .map(|start| {
            let mut scratch = Scratch::new(w.port_count());
            let mut tally = Tally::new(w.port_count());
            tally_keys(w, start..(start + chunk).min(n), key_is_src, partners, &mut scratch, &mut tally);
            tally
        })
        .reduce(|| Tally::new(w.port_count()), Tally::merge)
}

/// Adjacency lists in compressed rows.
struct Csr {
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl Csr {
    fn build(rows: usize, edges: impl Iterator<Item = (u32, u32)> + Clone) -> Csr {
        let mut offsets = vec![0u32; rows + 1];
        for (r, _) in edges.clone() {
            offsets[r as usize + 1] += 1;
        }
        for i in 0..rows {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; offsets[rows] as usize];
        for (r, t) in edges {
            targets[fill[r as usize] as usize] = t;
            fill[r as usize] += 1;
        }
        Csr { offsets, targets }
    }

    fn row(&self, r: u32) -> &[u32] {
        &self.targets[self.offsets[r as usize] as usize..self.offsets[r as usize + 1] as usize]
    }
}
