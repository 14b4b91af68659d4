use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Link, Removal, Topology, Uuid};
use crate::error::TopologyError;

/// Fabric equipment that random degradation may remove.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EquipmentKind {
    /// Non-leaf switches, together with all their links.
    Switches,
    /// Single switch-to-switch cables (one member of a parallel bundle).
    Links,
}

impl fmt::Display for EquipmentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EquipmentKind::Switches => "switches",
            EquipmentKind::Links => "links",
        })
    }
}

impl FromStr for EquipmentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "switches" | "switch" => Ok(EquipmentKind::Switches),
            "links" | "link" => Ok(EquipmentKind::Links),
            other => Err(format!("unknown equipment kind `{other}` (switches|links)")),
        }
    }
}

fn removable_switches(topo: &Topology) -> Vec<Uuid> {
    topo.switches().map(|s| s.uuid).filter(|&u| !topo.is_leaf(u)).collect()
}

/// How many elements of `kind` could be removed. Nodes and node cables never are.
pub fn removable_count(topo: &Topology, kind: EquipmentKind) -> usize {
    match kind {
        EquipmentKind::Switches => removable_switches(topo).len(),
        EquipmentKind::Links => topo.switch_links().len(),
    }
}

impl Topology {
    /// Returns a copy with `amount` distinct elements of `kind` removed,
    /// drawn uniformly with a generator seeded by `seed`.
    pub fn degrade(&self, kind: EquipmentKind, amount: usize, seed: u64) -> Result<Topology, TopologyError> {
        let mut out = self.clone();
        out.degrade_in_place(kind, amount, seed)?;
        Ok(out)
    }

    pub fn degrade_in_place(&mut self, kind: EquipmentKind, amount: usize, seed: u64) -> Result<(), TopologyError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match kind {
            EquipmentKind::Switches => {
                let pool = removable_switches(self);
                check_amount(kind, amount, pool.len())?;
                for i in rand::seq::index::sample(&mut rng, pool.len(), amount) {
                    self.remove_switch(pool[i]);
                }
            }
            EquipmentKind::Links => {
                let pool = self.switch_links();
                check_amount(kind, amount, pool.len())?;
                for i in rand::seq::index::sample(&mut rng, pool.len(), amount) {
                    self.remove_link(pool[i]);
                }
            }
        }
        Ok(())
    }

    /// Removes one switch-to-switch cable. Node cables are refused.
    pub fn remove_link(&mut self, link: Link) -> bool {
        let is_switch = |u| self.switches.contains_key(&u);
        let present = is_switch(link.a.uuid)
            && is_switch(link.b.uuid)
            && self.switches[&link.a.uuid].ports.get(link.a.port as usize) == Some(&Some(link.b));
        if present {
            self.unlink(link);
            self.removed.push(Removal::Link(link));
        }
        present
    }

    /// Removes a switch and journals its cables before the switch itself,
    /// so that [`Topology::restore`] recreates the switch first.
    pub fn remove_switch(&mut self, uuid: Uuid) -> bool {
        let Some(sw) = self.switches.get(&uuid) else {
            return false;
        };
        let links: Vec<Link> = sw
            .linked_ports()
            .map(|(p, peer)| Link::new(super::Endpoint::new(uuid, p), peer))
            .collect();
        for link in links {
            self.unlink(link);
            self.removed.push(Removal::Link(link));
        }
        self.switches.remove(&uuid);
        self.removed.push(Removal::Switch(uuid));
        true
    }
}

pub(crate) fn check_amount(kind: EquipmentKind, requested: usize, available: usize) -> Result<(), TopologyError> {
    if requested > available {
        return Err(TopologyError::AmountTooLarge {
            kind: match kind {
                EquipmentKind::Switches => "switches",
                EquipmentKind::Links => "links",
            },
            requested,
            available,
        });
    }
    Ok(())
}
