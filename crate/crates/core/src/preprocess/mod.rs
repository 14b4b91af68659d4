//! Everything the route computation needs, derived from a (possibly
//! degraded) topology: ranks, port groups, costs, dividers and topological NIDs.

mod costs;
mod fabric;
mod groups;
mod nids;
mod ranks;

use std::fmt::Write as _;

pub use costs::{check_validity, compute_costs_dividers, CostMatrix, DividerMap, Validity, UNREACHABLE};
pub use fabric::{Fabric, PortTarget};
pub use groups::{build_port_groups, Direction, PortGroup, PortGroupTable};
pub use nids::{compute_topological_nids, NidMap};
pub use ranks::{assign_ranks, Ranks};

use crate::topology::Topology;

/// Output of the full preprocessing pass.
#[derive(Clone, Debug)]
pub struct Preprocessed {
    pub fabric: Fabric,
    pub ranks: Ranks,
    pub groups: PortGroupTable,
    pub costs: CostMatrix,
    pub dividers: DividerMap,
    pub nids: NidMap,
    pub validity: Validity,
}

impl Preprocessed {
    pub fn run(topo: &Topology) -> Self {
        let fabric = Fabric::from_topology(topo);
        let ranks = assign_ranks(&fabric);
        let groups = build_port_groups(&fabric, &ranks);
        let (costs, dividers) = compute_costs_dividers(&fabric, &ranks, &groups);
        let nids = compute_topological_nids(&fabric, &costs);
        let validity = check_validity(&costs);
        Preprocessed {
            fabric,
            ranks,
            groups,
            costs,
            dividers,
            nids,
            validity,
        }
    }

    /// `switch_uuid,leaf_uuid,cost` rows; infinite costs are written as `inf`.
    pub fn costs_csv(&self) -> String {
        let mut out = String::from("switch_uuid,leaf_uuid,cost\n");
        for s in 0..self.fabric.switch_count() as u32 {
            for (col, &l) in self.costs.leaves().iter().enumerate() {
                let su = self.fabric.switch_uuid(s);
                let lu = self.fabric.switch_uuid(l);
                match self.costs.get(s, col as u32) {
                    Some(c) => writeln!(out, "{su},{lu},{c}").unwrap(),
                    None => writeln!(out, "{su},{lu},inf").unwrap(),
                }
            }
        }
        out
    }

    /// `node_uuid,nid` rows in NID order.
    pub fn nids_csv(&self) -> String {
        let mut out = String::from("node_uuid,nid\n");
        for (t, &n) in self.nids.order().iter().enumerate() {
            writeln!(out, "{},{t}", self.fabric.node_uuid(n)).unwrap();
        }
        out
    }
}
