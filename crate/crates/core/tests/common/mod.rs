//! Brute-force reference implementations, written against the raw topology
//! so they share no code with the library's preprocessing or analysis.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use dmodc_core::preprocess::Preprocessed;
use dmodc_core::router::Lft;
use dmodc_core::topology::{EquipmentKind, PgftParams, Topology, Uuid, UuidMode};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random PGFT with at most `max_switches` switches and `max_nodes` nodes,
/// optionally degraded by up to `max_removals` random elements.
pub fn random_instance(seed: u64, max_switches: usize, max_nodes: usize, max_removals: usize) -> (PgftParams, Topology) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let h = rng.random_range(1..=4);
        let mut m = Vec::new();
        let mut w = vec![1];
        let mut p = vec![1];
        for level in 0..h {
            m.push(rng.random_range(if level == 0 { 1..=6 } else { 1..=4 }));
            if level > 0 {
                w.push(rng.random_range(1..=4));
                p.push(rng.random_range(1..=2));
            }
        }
        let params = PgftParams::new(m, w, p);
        if params.validate().is_err() || params.node_count() > max_nodes {
            continue;
        }
        let switches: usize = (1..=h).map(|l| params.switch_count(l)).sum();
        if switches > max_switches {
            continue;
        }
        let mode = if rng.random_bool(0.5) {
            UuidMode::Shuffled(rng.random())
        } else {
            UuidMode::Sequential
        };
        let mut topo = params.build(mode).unwrap();
        let kind = if rng.random_bool(0.5) {
            EquipmentKind::Links
        } else {
            EquipmentKind::Switches
        };
        let available = dmodc_core::topology::removable_count(&topo, kind);
        let amount = rng.random_range(0..=max_removals).min(available);
        topo.degrade_in_place(kind, amount, rng.random()).unwrap();
        return (params, topo);
    }
}

/// Switch adjacency by UUID, one entry per cable.
pub fn switch_graph(topo: &Topology) -> BTreeMap<Uuid, Vec<Uuid>> {
    let mut g: BTreeMap<Uuid, Vec<Uuid>> = topo.switches().map(|s| (s.uuid, Vec::new())).collect();
    for s in topo.switches() {
        for (_, peer) in s.linked_ports() {
            if topo.switch(peer.uuid).is_some() {
                g.get_mut(&s.uuid).unwrap().push(peer.uuid);
            }
        }
    }
    g
}

pub fn oracle_leaves(topo: &Topology) -> Vec<Uuid> {
    let mut leaves: Vec<Uuid> = topo.nodes().map(|n| n.leaf.uuid).collect();
    leaves.sort();
    leaves.dedup();
    leaves
}

/// Hop distance to the nearest leaf; switches with no path are absent.
pub fn oracle_ranks(topo: &Topology) -> HashMap<Uuid, u32> {
    let g = switch_graph(topo);
    let mut rank = HashMap::new();
    let mut queue = VecDeque::new();
    for l in oracle_leaves(topo) {
        rank.insert(l, 0);
        queue.push_back(l);
    }
    while let Some(s) = queue.pop_front() {
        let r = rank[&s];
        for &n in &g[&s] {
            if let std::collections::hash_map::Entry::Vacant(e) = rank.entry(n) {
                e.insert(r + 1);
                queue.push_back(n);
            }
        }
    }
    rank
}

/// Shortest up*-down* hop count from every switch to every leaf, by BFS
/// over (switch, still-allowed-to-climb) states.
pub fn oracle_costs(topo: &Topology) -> HashMap<(Uuid, Uuid), u32> {
    let g = switch_graph(topo);
    let rank = oracle_ranks(topo);
    let leaves: HashSet<Uuid> = oracle_leaves(topo).into_iter().collect();
    let mut out = HashMap::new();
    for &start in g.keys() {
        if !rank.contains_key(&start) {
            continue;
        }
        let mut seen: HashSet<(Uuid, bool)> = HashSet::new();
        let mut queue = VecDeque::from([(start, true, 0u32)]);
        seen.insert((start, true));
        while let Some((s, climbing, d)) = queue.pop_front() {
            if leaves.contains(&s) {
                out.entry((start, s)).or_insert(d);
            }
            let rs = rank[&s];
            for &n in &g[&s] {
                let Some(&rn) = rank.get(&n) else { continue };
                let next = if rn == rs + 1 && climbing {
                    Some(true)
                } else if rn + 1 == rs {
                    Some(false)
                } else {
                    None
                };
                if let Some(c) = next {
                    if seen.insert((n, c)) {
                        queue.push_back((n, c, d + 1));
                    }
                }
            }
        }
    }
    out
}

/// Directed port identity: owner UUID and local port (0 for node ports).
pub type PortKey = (Uuid, u16);

pub enum Walk {
    Delivered(Vec<PortKey>),
    Failed,
}

/// Follows `lft` from node `src` to node `dst` through the raw topology.
/// Returns the directed ports crossed, starting with the node's own port.
pub fn oracle_walk(topo: &Topology, pre: &Preprocessed, lft: &Lft, src: Uuid, dst: Uuid) -> Walk {
    let t = pre.nids.nid(pre.fabric.node_index(dst).unwrap());
    let mut ports = vec![(src, 0)];
    let mut at = topo.node(src).unwrap().leaf.uuid;
    for _ in 0..=topo.switch_count() {
        let s = pre.fabric.switch_index(at).unwrap();
        let Some(p) = lft.port(s, t) else {
            return Walk::Failed;
        };
        ports.push((at, p));
        let Some(Some(peer)) = topo.switch(at).unwrap().ports.get(p as usize).copied() else {
            return Walk::Failed;
        };
        if topo.node(peer.uuid).is_some() {
            return if peer.uuid == dst { Walk::Delivered(ports) } else { Walk::Failed };
        }
        at = peer.uuid;
    }
    Walk::Failed
}

/// Naive per-port distinct-set recount: returns (max risk, valid flows).
pub fn naive_max_risk(topo: &Topology, pre: &Preprocessed, lft: &Lft, flows: &[(Uuid, Uuid)]) -> (u32, u64) {
    let mut srcs: HashMap<PortKey, HashSet<Uuid>> = HashMap::new();
    let mut dsts: HashMap<PortKey, HashSet<Uuid>> = HashMap::new();
    let mut valid = 0;
    for &(s, d) in flows {
        if s == d {
            continue;
        }
        if let Walk::Delivered(ports) = oracle_walk(topo, pre, lft, s, d) {
            valid += 1;
            for p in ports {
                srcs.entry(p).or_default().insert(s);
                dsts.entry(p).or_default().insert(d);
            }
        }
    }
    let max = srcs.iter().map(|(p, s)| s.len().min(dsts[p].len()) as u32).max().unwrap_or(0);
    (max, valid)
}

/// Node UUIDs by NID.
pub fn nodes_by_nid(pre: &Preprocessed) -> Vec<Uuid> {
    (0..pre.nids.len() as u32).map(|t| pre.fabric.node_uuid(pre.nids.node(t))).collect()
}

pub fn naive_a2a(topo: &Topology, pre: &Preprocessed, lft: &Lft) -> u32 {
    let nodes: Vec<Uuid> = topo.nodes().map(|n| n.uuid).collect();
    let flows: Vec<(Uuid, Uuid)> = nodes.iter().flat_map(|&s| nodes.iter().map(move |&d| (s, d))).collect();
    naive_max_risk(topo, pre, lft, &flows).0
}

/// Shift permutations over nodes in NID order (`by_uuid` false) or UUID
/// order; maximum over shifts.
pub fn naive_sp(topo: &Topology, pre: &Preprocessed, lft: &Lft, by_uuid: bool) -> u32 {
    let order: Vec<Uuid> = if by_uuid {
        topo.nodes().map(|n| n.uuid).collect()
    } else {
        nodes_by_nid(pre)
    };
    let n = order.len();
    (1..n)
        .map(|k| {
            let flows: Vec<_> = (0..n).map(|i| (order[i], order[(i + k) % n])).collect();
            naive_max_risk(topo, pre, lft, &flows).0
        })
        .max()
        .unwrap_or(0)
}

/// Random permutations drawn independently with the documented scheme
/// (ChaCha8 seeded by `seed`, stream = sample index, Fisher–Yates over
/// NIDs); lower median of per-sample maxima.
pub fn naive_rp(topo: &Topology, pre: &Preprocessed, lft: &Lft, samples: usize, seed: u64) -> u32 {
    let by_nid = nodes_by_nid(pre);
    let mut maxima: Vec<u32> = (0..samples)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut perm: Vec<usize> = (0..by_nid.len()).collect();
            perm.shuffle(&mut rng);
            let flows: Vec<_> = perm.iter().enumerate().map(|(s, &d)| (by_nid[s], by_nid[d])).collect();
            naive_max_risk(topo, pre, lft, &flows).0
        })
        .collect();
    maxima.sort();
    maxima[(samples - 1) / 2]
}
