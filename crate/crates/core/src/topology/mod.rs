//! Fabric graphs: switches, nodes and the physical links between their ports.
//!
//! A [`Topology`] references elements by [`Uuid`] only, so removing a switch
//! never invalidates anything else. Dense indices are introduced later by
//! [`crate::preprocess::Fabric`].

mod degrade;
mod io;
mod pgft;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

pub(crate) use degrade::check_amount;
pub use degrade::{removable_count, EquipmentKind};
pub use pgft::{PgftParams, UuidMode, MAX_ELEMENTS};

use crate::error::TopologyError;

/// Fabric-wide 64-bit identifier of a switch or node.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Uuid(pub u64);

impl fmt::Display for Uuid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

impl FromStr for Uuid {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        u64::from_str_radix(s, 16).map(Uuid)
    }
}

/// One side of a link: an element and one of its local port indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Endpoint {
    pub uuid: Uuid,
    pub port: u16,
}

impl Endpoint {
    pub fn new(uuid: Uuid, port: u16) -> Self {
        Self { uuid, port }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.uuid, self.port)
    }
}

impl FromStr for Endpoint {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (uuid, port) = s.split_once(':').ok_or_else(|| format!("expected <uuid>:<port>, got `{s}`"))?;
        let uuid = uuid.parse().map_err(|e| format!("bad uuid `{uuid}`: {e}"))?;
        let port = port.parse().map_err(|e| format!("bad port `{port}`: {e}"))?;
        Ok(Endpoint { uuid, port })
    }
}

/// A physical link, stored with the lower endpoint first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Link {
    pub a: Endpoint,
    pub b: Endpoint,
}

impl Link {
    pub fn new(x: Endpoint, y: Endpoint) -> Self {
        if x <= y {
            Link { a: x, b: y }
        } else {
            Link { a: y, b: x }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Switch {
    pub uuid: Uuid,
    /// Peer of each local port; `None` for an uncabled port.
    pub ports: Vec<Option<Endpoint>>,
}

impl Switch {
    pub fn new(uuid: Uuid, port_count: usize) -> Self {
        Self {
            uuid,
            ports: vec![None; port_count],
        }
    }

    pub fn linked_ports(&self) -> impl Iterator<Item = (u16, Endpoint)> + '_ {
        self.ports.iter().enumerate().filter_map(|(i, p)| p.map(|peer| (i as u16, peer)))
    }
}

/// A compute node. Nodes have a single port (index 0) cabled to a leaf switch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub uuid: Uuid,
    pub leaf: Endpoint,
}

/// One entry of the degradation journal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Removal {
    Switch(Uuid),
    Link(Link),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Topology {
    switches: BTreeMap<Uuid, Switch>,
    nodes: BTreeMap<Uuid, Node>,
    provenance: Option<PgftParams>,
    removed: Vec<Removal>,
}

impl Topology {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn switch_count(&self) -> usize {
        self.switches.len()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Switches in UUID order.
    pub fn switches(&self) -> impl Iterator<Item = &Switch> {
        self.switches.values()
    }

    /// Nodes in UUID order.
    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    pub fn switch(&self, uuid: Uuid) -> Option<&Switch> {
        self.switches.get(&uuid)
    }

    pub fn node(&self, uuid: Uuid) -> Option<&Node> {
        self.nodes.get(&uuid)
    }

    pub fn provenance(&self) -> Option<&PgftParams> {
        self.provenance.as_ref()
    }

    pub fn set_provenance(&mut self, params: Option<PgftParams>) {
        self.provenance = params;
    }

    pub fn journal(&self) -> &[Removal] {
        &self.removed
    }

    fn contains(&self, uuid: Uuid) -> bool {
        self.switches.contains_key(&uuid) || self.nodes.contains_key(&uuid)
    }

    pub fn add_switch(&mut self, uuid: Uuid, port_count: usize) -> Result<(), String> {
        if self.contains(uuid) {
            return Err(format!("duplicate uuid {uuid}"));
        }
        self.switches.insert(uuid, Switch::new(uuid, port_count));
        Ok(())
    }

    /// Adds a node cabled to `leaf`, which must name a free port of an existing switch.
    pub fn add_node(&mut self, uuid: Uuid, leaf: Endpoint) -> Result<(), String> {
        if self.contains(uuid) {
            return Err(format!("duplicate uuid {uuid}"));
        }
        let slot = self.free_switch_port(leaf)?;
        *slot = Some(Endpoint::new(uuid, 0));
        self.nodes.insert(uuid, Node { uuid, leaf });
        Ok(())
    }

    /// Cables two switch ports together.
    pub fn connect(&mut self, x: Endpoint, y: Endpoint) -> Result<(), String> {
        if x.uuid == y.uuid {
            return Err(format!("self link {x} {y}"));
        }
        self.free_switch_port(x)?;
        self.free_switch_port(y)?;
        *self.free_switch_port(x)? = Some(y);
        *self.free_switch_port(y)? = Some(x);
        Ok(())
    }

    fn free_switch_port(&mut self, at: Endpoint) -> Result<&mut Option<Endpoint>, String> {
        let sw = self
            .switches
            .get_mut(&at.uuid)
            .ok_or_else(|| format!("unknown switch {}", at.uuid))?;
        let idx = at.port as usize;
        if idx >= sw.ports.len() {
            sw.ports.resize(idx + 1, None);
        }
        let slot = &mut sw.ports[idx];
        if let Some(peer) = slot {
            return Err(format!("port {at} already linked to {peer}"));
        }
        Ok(slot)
    }

    /// Every physical link once, node links included, sorted.
    pub fn links(&self) -> Vec<Link> {
        let mut out: Vec<Link> = self
            .switches
            .values()
            .flat_map(|s| s.linked_ports().map(move |(p, peer)| Link::new(Endpoint::new(s.uuid, p), peer)))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Switch-to-switch links only.
    pub fn switch_links(&self) -> Vec<Link> {
        self.links()
            .into_iter()
            .filter(|l| self.switches.contains_key(&l.a.uuid) && self.switches.contains_key(&l.b.uuid))
            .collect()
    }

    /// Whether a switch has at least one attached node.
    pub fn is_leaf(&self, uuid: Uuid) -> bool {
        self.switches
            .get(&uuid)
            .map(|s| s.ports.iter().flatten().any(|p| self.nodes.contains_key(&p.uuid)))
            .unwrap_or(false)
    }

    /// Full scan of port symmetry and node attachment.
    pub fn validate(&self) -> Result<(), TopologyError> {
        for sw in self.switches.values() {
            for (port, peer) in sw.linked_ports() {
                let here = Endpoint::new(sw.uuid, port);
                let back = if let Some(other) = self.switches.get(&peer.uuid) {
                    other.ports.get(peer.port as usize).copied().flatten()
                } else if let Some(node) = self.nodes.get(&peer.uuid) {
                    (peer.port == 0).then_some(node.leaf)
                } else {
                    return Err(TopologyError::Dangling(here));
                };
                if back != Some(here) {
                    return Err(TopologyError::Asymmetric(here));
                }
            }
        }
        for node in self.nodes.values() {
            let back = self
                .switches
                .get(&node.leaf.uuid)
                .and_then(|s| s.ports.get(node.leaf.port as usize).copied().flatten());
            if back != Some(Endpoint::new(node.uuid, 0)) {
                return Err(TopologyError::Detached(node.uuid));
            }
        }
        Ok(())
    }

    fn unlink(&mut self, link: Link) {
        for (here, there) in [(link.a, link.b), (link.b, link.a)] {
            if let Some(sw) = self.switches.get_mut(&here.uuid) {
                let slot = &mut sw.ports[here.port as usize];
                debug_assert_eq!(*slot, Some(there));
                *slot = None;
            }
        }
    }

    /// Undoes every journaled removal, newest first.
    pub fn restore(&mut self) {
        let journal = std::mem::take(&mut self.removed);
        for entry in journal.iter().rev() {
            match entry {
                Removal::Switch(uuid) => {
                    self.switches.insert(*uuid, Switch::new(*uuid, 0));
                }
                Removal::Link(link) => {
                    self.connect(link.a, link.b).expect("journal links reconnect onto free ports");
                }
            }
        }
    }
}
