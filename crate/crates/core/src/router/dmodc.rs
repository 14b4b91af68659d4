use std::collections::HashMap;

use rayon::prelude::*;

use super::lft::{Lft, SwitchTable, NO_ROUTE, NO_SET};
use super::{closer_groups, leaf_of_nid};
use crate::error::RouteError;
use crate::preprocess::{CostMatrix, DividerMap, Fabric, NidMap, PortGroup, PortGroupTable, UNREACHABLE};

/// Closed-form port choice. With `C` the closer groups (remote UUID order)
/// and `Π` the switch divider, destination NID `t` leaves through group
/// `C[(t / Π) mod |C|]` and, inside it, port `g[(t / (Π·|C|)) mod |g|]`.
#[inline]
pub fn select_port(candidates: &[&PortGroup], divider: u64, nid: u32) -> u16 {
    let t = nid as u64;
    let k = candidates.len() as u64;
    let group = candidates[((t / divider) % k) as usize];
    let within = (t / (divider * k)) % group.ports.len() as u64;
    group.ports[within as usize]
}

/// Computes every switch's table independently, in parallel over switches.
pub fn compute_dmodc(
    fabric: &Fabric,
    groups: &PortGroupTable,
    costs: &CostMatrix,
    dividers: &DividerMap,
    nids: &NidMap,
) -> Result<Lft, RouteError> {
    let tables = (0..fabric.switch_count() as u32)
        .into_par_iter()
        .map(|s| switch_table(fabric, groups, costs, dividers.get(s), nids, s))
        .collect::<Result<Vec<_>, _>>()?;
    let uuids = (0..fabric.switch_count() as u32).map(|s| fabric.switch_uuid(s)).collect();
    Ok(Lft::new(uuids, tables, leaf_of_nid(fabric, costs, nids), nids.len()))
}

fn switch_table(
    fabric: &Fabric,
    groups: &PortGroupTable,
    costs: &CostMatrix,
    divider: u64,
    nids: &NidMap,
    s: u32,
) -> Result<SwitchTable, RouteError> {
    let mut ports = vec![NO_ROUTE; nids.len()];
    let mut alt_sets = Vec::new();
    let mut alt_index = HashMap::new();
    let mut alt_of_leaf = vec![NO_SET; costs.width()];
    let row = costs.row(s);
    let mut candidates: Vec<&PortGroup> = Vec::new();

    for (col, &leaf) in costs.leaves().iter().enumerate() {
        if leaf == s {
            for (port, node) in fabric.nodes_on(s) {
                ports[nids.nid(node) as usize] = port;
            }
            continue;
        }
        let cost = row[col];
        if cost == UNREACHABLE {
            continue;
        }
        candidates.clear();
        candidates.extend(closer_groups(groups, costs, s, col as u32, cost).map(|(_, g)| g));
        if candidates.is_empty() {
            return Err(RouteError::NoCloserGroup {
                switch: fabric.switch_uuid(s),
                leaf: fabric.switch_uuid(leaf),
                cost,
            });
        }
        let alts: Vec<u16> = candidates.iter().flat_map(|g| g.ports.iter().copied()).collect();
        alt_of_leaf[col] = SwitchTable::intern(&mut alt_sets, &mut alt_index, alts);
        for (_, node) in fabric.nodes_on(leaf) {
            let t = nids.nid(node);
            ports[t as usize] = select_port(&candidates, divider, t);
        }
    }
    Ok(SwitchTable::with_alternatives(ports, alt_sets, alt_of_leaf))
}
