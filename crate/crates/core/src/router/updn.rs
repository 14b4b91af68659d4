use rayon::prelude::*;

use super::lft::{Lft, SwitchTable, NO_ROUTE};
use super::{closer_groups, leaf_of_nid};
use crate::error::RouteError;
use crate::preprocess::{CostMatrix, Fabric, NidMap, PortGroupTable, UNREACHABLE};

/// Load-balancing up*/down* baseline in the style of MinHop: destinations
/// are routed in NID order, each onto the least used closer group and then
/// the least used port of that group. Counters live per switch and start
/// at zero on every computation; ties go to the lower remote UUID, then the
/// lower port index.
pub fn compute_updn(fabric: &Fabric, groups: &PortGroupTable, costs: &CostMatrix, nids: &NidMap) -> Result<Lft, RouteError> {
    let tables = (0..fabric.switch_count() as u32)
        .into_par_iter()
        .map(|s| switch_table(fabric, groups, costs, nids, s))
        .collect::<Result<Vec<_>, _>>()?;
    let uuids = (0..fabric.switch_count() as u32).map(|s| fabric.switch_uuid(s)).collect();
    Ok(Lft::new(uuids, tables, leaf_of_nid(fabric, costs, nids), nids.len()))
}

fn switch_table(fabric: &Fabric, groups: &PortGroupTable, costs: &CostMatrix, nids: &NidMap, s: u32) -> Result<SwitchTable, RouteError> {
    let own = groups.groups(s);
    let mut group_load = vec![0u32; own.len()];
    let mut port_load = vec![0u32; fabric.ports(s).len()];
    let mut ports = vec![NO_ROUTE; nids.len()];
    // closer group indices, per leaf column, computed on first use
    let mut closer: Vec<Option<Vec<usize>>> = vec![None; costs.width()];
    let row = costs.row(s);

    for (t, &node) in nids.order().iter().enumerate() {
        let (leaf, leaf_port) = fabric.attachment(node);
        if leaf == s {
            ports[t] = leaf_port;
            continue;
        }
        let col = costs.column(leaf).expect("nodes hang off leaves");
        let cost = row[col as usize];
        if cost == UNREACHABLE {
            continue;
        }
        let candidates = closer[col as usize].get_or_insert_with(|| closer_groups(groups, costs, s, col, cost).map(|(i, _)| i).collect());
        let Some(&gi) = candidates.iter().min_by_key(|&&i| (group_load[i], i)) else {
            return Err(RouteError::NoCloserGroup {
                switch: fabric.switch_uuid(s),
                leaf: fabric.switch_uuid(leaf),
                cost,
            });
        };
        let port = *own[gi]
            .ports
            .iter()
            .min_by_key(|&&p| (port_load[p as usize], p))
            .expect("groups are never empty");
        group_load[gi] += 1;
        port_load[port as usize] += 1;
        ports[t] = port;
    }
    Ok(SwitchTable::new(ports))
}
