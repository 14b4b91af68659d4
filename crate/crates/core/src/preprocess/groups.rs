use std::collections::BTreeMap;

use super::fabric::{Fabric, PortTarget};
use super::ranks::Ranks;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

/// Ports of one switch cabled to the same neighbour switch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortGroup {
    pub remote: u32,
    pub ports: Vec<u16>,
    pub direction: Direction,
}

/// Per switch, its port groups sorted by remote UUID.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortGroupTable {
    groups: Vec<Vec<PortGroup>>,
}

impl PortGroupTable {
    pub fn groups(&self, s: u32) -> &[PortGroup] {
        &self.groups[s as usize]
    }

    pub fn up_groups(&self, s: u32) -> impl Iterator<Item = &PortGroup> {
        self.groups(s).iter().filter(|g| g.direction == Direction::Up)
    }

    pub fn down_groups(&self, s: u32) -> impl Iterator<Item = &PortGroup> {
        self.groups(s).iter().filter(|g| g.direction == Direction::Down)
    }

    /// Number of distinct switches above `s`.
    pub fn up_count(&self, s: u32) -> usize {
        self.up_groups(s).count()
    }
}

/// Groups every port whose peer sits exactly one rank above or below.
/// Unranked switches and equal-rank cables get no group.
pub fn build_port_groups(fabric: &Fabric, ranks: &Ranks) -> PortGroupTable {
    let groups = (0..fabric.switch_count() as u32)
        .map(|s| {
            let Some(rank) = ranks.rank(s) else {
                return Vec::new();
            };
            // BTreeMap keyed by remote index, i.e. by remote UUID
            let mut by_remote: BTreeMap<u32, PortGroup> = BTreeMap::new();
            for (p, t) in fabric.ports(s).iter().enumerate() {
                let PortTarget::Switch { switch, .. } = *t else {
                    continue;
                };
                let direction = match ranks.rank(switch) {
                    Some(r) if r == rank + 1 => Direction::Up,
                    Some(r) if r + 1 == rank => Direction::Down,
                    _ => continue,
                };
                by_remote
                    .entry(switch)
                    .or_insert_with(|| PortGroup {
                        remote: switch,
                        ports: Vec::new(),
                        direction,
                    })
                    .ports
                    .push(p as u16);
            }
            by_remote.into_values().collect()
        })
        .collect();
    PortGroupTable { groups }
}
