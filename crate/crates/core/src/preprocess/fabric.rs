use crate::topology::{Topology, Uuid};

/// What a switch port is cabled to, in dense indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PortTarget {
    Unlinked,
    Switch { switch: u32, port: u16 },
    Node(u32),
}

/// Index-based snapshot of a [`Topology`]. Switches and nodes are numbered
/// in UUID order, so comparing indices compares UUIDs.
///
/// Every switch egress port and every node egress port also gets a dense
/// directed-port id, used by the congestion analysis.
#[derive(Clone, Debug)]
pub struct Fabric {
    switch_uuids: Vec<Uuid>,
    node_uuids: Vec<Uuid>,
    ports: Vec<Vec<PortTarget>>,
    node_attach: Vec<(u32, u16)>,
    port_base: Vec<u32>,
}

impl Fabric {
    pub fn from_topology(topo: &Topology) -> Self {
        let switch_uuids: Vec<Uuid> = topo.switches().map(|s| s.uuid).collect();
        let node_uuids: Vec<Uuid> = topo.nodes().map(|n| n.uuid).collect();
        let find = |v: &[Uuid], u: Uuid| v.binary_search(&u).ok().map(|i| i as u32);

        let ports: Vec<Vec<PortTarget>> = topo
            .switches()
            .map(|s| {
                s.ports
                    .iter()
                    .map(|peer| match peer {
                        None => PortTarget::Unlinked,
                        Some(e) => {
                            if let Some(sw) = find(&switch_uuids, e.uuid) {
                                PortTarget::Switch { switch: sw, port: e.port }
                            } else if let Some(n) = find(&node_uuids, e.uuid) {
                                PortTarget::Node(n)
                            } else {
                                PortTarget::Unlinked
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        let node_attach = topo
            .nodes()
            .map(|n| {
                let sw = find(&switch_uuids, n.leaf.uuid).expect("validated topology");
                (sw, n.leaf.port)
            })
            .collect();
        let mut port_base = Vec::with_capacity(ports.len() + 1);
        let mut acc = 0u32;
        for p in &ports {
            port_base.push(acc);
            acc += p.len() as u32;
        }
        port_base.push(acc);

        Fabric {
            switch_uuids,
            node_uuids,
            ports,
            node_attach,
            port_base,
        }
    }

    pub fn switch_count(&self) -> usize {
        self.switch_uuids.len()
    }

    pub fn node_count(&self) -> usize {
        self.node_uuids.len()
    }

    pub fn switch_uuid(&self, s: u32) -> Uuid {
        self.switch_uuids[s as usize]
    }

    pub fn node_uuid(&self, n: u32) -> Uuid {
        self.node_uuids[n as usize]
    }

    pub fn switch_index(&self, uuid: Uuid) -> Option<u32> {
        self.switch_uuids.binary_search(&uuid).ok().map(|i| i as u32)
    }

    pub fn node_index(&self, uuid: Uuid) -> Option<u32> {
        self.node_uuids.binary_search(&uuid).ok().map(|i| i as u32)
    }

    pub fn ports(&self, s: u32) -> &[PortTarget] {
        &self.ports[s as usize]
    }

    pub fn port(&self, s: u32, port: u16) -> PortTarget {
        self.ports[s as usize].get(port as usize).copied().unwrap_or(PortTarget::Unlinked)
    }

    /// Leaf switch and leaf port of a node.
    pub fn attachment(&self, n: u32) -> (u32, u16) {
        self.node_attach[n as usize]
    }

    /// Nodes cabled to `s`, in local port order.
    pub fn nodes_on(&self, s: u32) -> impl Iterator<Item = (u16, u32)> + '_ {
        self.ports[s as usize].iter().enumerate().filter_map(|(i, t)| match t {
            PortTarget::Node(n) => Some((i as u16, *n)),
            _ => None,
        })
    }

    pub fn has_nodes(&self, s: u32) -> bool {
        self.nodes_on(s).next().is_some()
    }

    /// Total number of directed ports (switch egress ports then node egress ports).
    pub fn directed_port_count(&self) -> usize {
        *self.port_base.last().unwrap() as usize + self.node_uuids.len()
    }

    pub fn switch_port_id(&self, s: u32, port: u16) -> u32 {
        self.port_base[s as usize] + port as u32
    }

    pub fn node_port_id(&self, n: u32) -> u32 {
        *self.port_base.last().unwrap() + n
    }

    /// Owning element and local port of a directed-port id.
    pub fn describe_port(&self, id: u32) -> (Uuid, u16) {
        let switch_ports = *self.port_base.last().unwrap();
        if id >= switch_ports {
            return (self.node_uuid(id - switch_ports), 0);
        }
        let s = self.port_base.partition_point(|&b| b <= id) - 1;
        (self.switch_uuids[s], (id - self.port_base[s]) as u16)
    }
}
