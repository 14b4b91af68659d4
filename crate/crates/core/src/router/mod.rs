//! Forwarding table computation: the closed-form Dmodc routing and a
//! counter-based up*/down* baseline, plus a table walker.

mod dmodc;
mod lft;
mod trace;
mod updn;

use std::fmt;
use std::str::FromStr;

pub use dmodc::{compute_dmodc, select_port};
pub use lft::{Lft, SwitchTable, NO_ROUTE};
pub use trace::{trace, Hop, RouteTrace, TraceError};
pub use updn::compute_updn;

use crate::error::RouteError;
use crate::preprocess::{CostMatrix, Direction, Fabric, NidMap, PortGroup, PortGroupTable, Preprocessed};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Dmodc,
    Updn,
}

impl Algorithm {
    pub const ALL: [Algorithm; 2] = [Algorithm::Dmodc, Algorithm::Updn];

    pub fn route(self, pre: &Preprocessed) -> Result<Lft, RouteError> {
        match self {
            Algorithm::Dmodc => compute_dmodc(&pre.fabric, &pre.groups, &pre.costs, &pre.dividers, &pre.nids),
            Algorithm::Updn => compute_updn(&pre.fabric, &pre.groups, &pre.costs, &pre.nids),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Dmodc => "dmodc",
            Algorithm::Updn => "updn",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dmodc" => Ok(Algorithm::Dmodc),
            "updn" => Ok(Algorithm::Updn),
            other => Err(format!("unknown algorithm `{other}` (expected dmodc or updn)")),
        }
    }
}

/// Groups of `s` whose remote switch is strictly closer than `cost` to the
/// leaf in column `col`, with their index in `groups.groups(s)`.
///
/// A child only counts through its descent-only cost: once a packet heads
/// down it must never climb again, and a child whose best path turns back
/// up would otherwise look closer on degraded fabrics of four levels or more.
pub(crate) fn closer_groups<'a>(
    groups: &'a PortGroupTable,
    costs: &'a CostMatrix,
    s: u32,
    col: u32,
    cost: u32,
) -> impl Iterator<Item = (usize, &'a PortGroup)> + 'a {
    groups.groups(s).iter().enumerate().filter(move |(_, g)| {
        let remote = match g.direction {
            Direction::Up => costs.row(g.remote),
            Direction::Down => costs.descent_row(g.remote),
        };
        remote[col as usize] < cost
    })
}

pub(crate) fn leaf_of_nid(fabric: &Fabric, costs: &CostMatrix, nids: &NidMap) -> Vec<u32> {
    nids.order()
        .iter()
        .map(|&n| costs.column(fabric.attachment(n).0).expect("nodes hang off leaves"))
        .collect()
}

/// Walks from node `src` to node `dst`. A legal route crosses at most
/// `2·h − 1` switches on an `h`-level fabric; walks reaching `2·h` are
/// reported as loops.
pub fn trace_nodes(pre: &Preprocessed, lft: &Lft, src: u32, dst: u32) -> Result<RouteTrace, TraceError> {
    let levels = pre.ranks.max_rank() as usize;
    trace(&pre.fabric, lft, pre.nids.nid(dst), src, dst, 2 * levels)
}
