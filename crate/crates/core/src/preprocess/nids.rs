use super::costs::{CostMatrix, UNREACHABLE};
use super::fabric::Fabric;

/// Topological node identifiers: nodes sharing a leaf, then nodes of the
/// nearest leaves, get contiguous numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NidMap {
    nid: Vec<u32>,
    order: Vec<u32>,
}

impl NidMap {
    /// NID of node index `n`.
    pub fn nid(&self, n: u32) -> u32 {
        self.nid[n as usize]
    }

    /// Node index holding NID `t`.
    pub fn node(&self, t: u32) -> u32 {
        self.order[t as usize]
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Node indices in NID order.
    pub fn order(&self) -> &[u32] {
        &self.order
    }
}

/// Walks the leaves in UUID order. The first pending leaf pulls in every
/// pending leaf at minimal cost from it (itself included, at cost 0), and
/// their nodes are numbered leaf by leaf in local port order.
pub fn compute_topological_nids(fabric: &Fabric, costs: &CostMatrix) -> NidMap {
    let leaves = costs.leaves();
    let mut pending: Vec<u32> = (0..leaves.len() as u32).collect();
    let mut nid = vec![UNREACHABLE; fabric.node_count()];
    let mut order = Vec::with_capacity(fabric.node_count());

    while let Some(&head) = pending.first() {
        let from = costs.row(leaves[head as usize]);
        let mu = pending[1..].iter().map(|&c| from[c as usize]).min().unwrap_or(UNREACHABLE);
        let (taken, rest): (Vec<u32>, Vec<u32>) = pending.iter().partition(|&&c| from[c as usize] <= mu);
        for col in taken {
            for (_, n) in fabric.nodes_on(leaves[col as usize]) {
                nid[n as usize] = order.len() as u32;
                order.push(n);
            }
        }
        pending = rest;
    }
    debug_assert!(nid.iter().all(|&t| t != UNREACHABLE));
    NidMap { nid, order }
}
