use std::collections::VecDeque;

use log::warn;

use super::fabric::{Fabric, PortTarget};
use crate::topology::{Endpoint, Uuid};

/// Switch levels, counted from the leaves (rank 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ranks {
    rank: Vec<Option<u32>>,
    levels: Vec<Vec<u32>>,
    /// Cables between equal-rank switches; never used for routing.
    pub excluded_links: Vec<(Endpoint, Endpoint)>,
    /// Switches with no path to any leaf.
    pub unranked: Vec<Uuid>,
}

impl Ranks {
    pub fn rank(&self, s: u32) -> Option<u32> {
        self.rank[s as usize]
    }

    pub fn max_rank(&self) -> u32 {
        self.levels.len() as u32
    }

    /// Switches of rank `r` in index order.
    pub fn level(&self, r: u32) -> &[u32] {
        r.checked_sub(1)
            .and_then(|i| self.levels.get(i as usize))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn is_leaf(&self, s: u32) -> bool {
        self.rank(s) == Some(1)
    }
}

/// Multi-source BFS from every switch with an attached node.
pub fn assign_ranks(fabric: &Fabric) -> Ranks {
    let n = fabric.switch_count();
    let mut rank = vec![None; n];
    let mut queue = VecDeque::new();
    for s in 0..n as u32 {
        if fabric.has_nodes(s) {
            rank[s as usize] = Some(1);
            queue.push_back(s);
        }
    }
    while let Some(s) = queue.pop_front() {
        let r = rank[s as usize].unwrap();
        for t in fabric.ports(s) {
            if let PortTarget::Switch { switch, .. } = *t {
                if rank[switch as usize].is_none() {
                    rank[switch as usize] = Some(r + 1);
                    queue.push_back(switch);
                }
            }
        }
    }

    let max = rank.iter().flatten().copied().max().unwrap_or(0);
    let mut levels = vec![Vec::new(); max as usize];
    for (s, r) in rank.iter().enumerate() {
        if let Some(r) = r {
            levels[*r as usize - 1].push(s as u32);
        }
    }

    let mut excluded_links = Vec::new();
    for s in 0..n as u32 {
        for (p, t) in fabric.ports(s).iter().enumerate() {
            if let PortTarget::Switch { switch, port } = *t {
                if s < switch && rank[s as usize].is_some() && rank[s as usize] == rank[switch as usize] {
                    let a = Endpoint::new(fabric.switch_uuid(s), p as u16);
                    let b = Endpoint::new(fabric.switch_uuid(switch), port);
                    warn!("ignoring link {a} {b} between switches of equal rank");
                    excluded_links.push((a, b));
                }
            }
        }
    }
    let unranked: Vec<Uuid> = (0..n as u32)
        .filter(|&s| rank[s as usize].is_none())
        .map(|s| fabric.switch_uuid(s))
        .collect();
    for u in &unranked {
        warn!("switch {u} cannot reach any leaf and is excluded from routing");
    }

    Ranks {
        rank,
        levels,
        excluded_links,
        unranked,
    }
}
