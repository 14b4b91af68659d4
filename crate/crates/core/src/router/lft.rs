use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::error::ParseError;
use crate::preprocess::Fabric;
use crate::topology::Uuid;

/// Table entry for a destination the switch cannot reach.
pub const NO_ROUTE: u16 = u16::MAX;

pub const HEADER: &str = "lft v1";

pub(crate) const NO_SET: u32 = u32::MAX;

/// Forwarding state of one switch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwitchTable {
    /// Output port per destination NID.
    pub ports: Vec<u16>,
    // alternative sets depend only on the destination leaf, so they are
    // interned per switch and referenced by leaf column
    alt_sets: Vec<Vec<u16>>,
    alt_of_leaf: Vec<u32>,
}

impl SwitchTable {
    pub fn new(ports: Vec<u16>) -> Self {
        Self {
            ports,
            alt_sets: Vec::new(),
            alt_of_leaf: Vec::new(),
        }
    }

    pub(crate) fn with_alternatives(ports: Vec<u16>, alt_sets: Vec<Vec<u16>>, alt_of_leaf: Vec<u32>) -> Self {
        Self {
            ports,
            alt_sets,
            alt_of_leaf,
        }
    }

    pub(crate) fn intern(sets: &mut Vec<Vec<u16>>, index: &mut std::collections::HashMap<Vec<u16>, u32>, set: Vec<u16>) -> u32 {
        if let Some(&i) = index.get(&set) {
            return i;
        }
        let i = sets.len() as u32;
        sets.push(set.clone());
        index.insert(set, i);
        i
    }

    fn alternatives_for_leaf(&self, col: u32) -> &[u16] {
        match self.alt_of_leaf.get(col as usize) {
            Some(&i) if i != NO_SET => &self.alt_sets[i as usize],
            _ => &[],
        }
    }
}

/// Linear forwarding tables of a whole fabric, indexed like [`Fabric`]
/// switches and by destination NID.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lft {
    switch_uuids: Vec<Uuid>,
    tables: Vec<SwitchTable>,
    /// Leaf column of every NID; empty when alternatives are unknown.
    leaf_of_nid: Vec<u32>,
    nid_count: usize,
}

impl Lft {
    pub(crate) fn new(switch_uuids: Vec<Uuid>, tables: Vec<SwitchTable>, leaf_of_nid: Vec<u32>, nid_count: usize) -> Self {
        Self {
            switch_uuids,
            tables,
            leaf_of_nid,
            nid_count,
        }
    }

    pub fn switch_count(&self) -> usize {
        self.tables.len()
    }

    pub fn nid_count(&self) -> usize {
        self.nid_count
    }

    pub fn table(&self, s: u32) -> &SwitchTable {
        &self.tables[s as usize]
    }

    /// Deterministic output port of switch `s` towards NID `t`.
    #[inline]
    pub fn port(&self, s: u32, t: u32) -> Option<u16> {
        let p = self.tables[s as usize].ports[t as usize];
        (p != NO_ROUTE).then_some(p)
    }

    /// Alternative ports of switch `s` towards NID `t`: every port leading
    /// strictly closer to the destination leaf. Empty for attached nodes and
    /// for tables loaded from a dump.
    pub fn alternatives(&self, s: u32, t: u32) -> &[u16] {
        match self.leaf_of_nid.get(t as usize) {
            Some(&col) => self.tables[s as usize].alternatives_for_leaf(col),
            None => &[],
        }
    }

    /// Text dump: `lft v1`, then per switch in UUID order a `switch <uuid>`
    /// line followed by `<nid> <port>` lines, `-1` marking missing routes.
    pub fn dump(&self) -> String {
        let mut out = String::with_capacity(16 + self.tables.len() * (26 + self.nid_count * 8));
        out.push_str(HEADER);
        out.push('\n');
        for (uuid, table) in self.switch_uuids.iter().zip(&self.tables) {
            writeln!(out, "switch {uuid}").unwrap();
            for (t, &p) in table.ports.iter().enumerate() {
                if p == NO_ROUTE {
                    writeln!(out, "{t} -1").unwrap();
                } else {
                    writeln!(out, "{t} {p}").unwrap();
                }
            }
        }
        out
    }

    /// Parses a dump and aligns it with `fabric`. Switches absent from the
    /// dump get empty tables.
    pub fn from_dump(text: &str, fabric: &Fabric) -> Result<Lft, ParseError> {
        let nid_count = fabric.node_count();
        let mut tables = vec![SwitchTable::new(vec![NO_ROUTE; nid_count]); fabric.switch_count()];
        let mut seen = vec![false; fabric.switch_count()];
        let mut current: Option<usize> = None;
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        match lines.next() {
            Some((_, HEADER)) => {}
            Some((n, other)) => return Err(ParseError::new(n, format!("expected `{HEADER}`, got `{other}`"))),
            None => return Err(ParseError::new(1, "empty forwarding table")),
        }
        for (n, line) in lines {
            if let Some(u) = line.strip_prefix("switch ") {
                let uuid: Uuid = u.trim().parse().map_err(|e| ParseError::new(n, format!("bad uuid `{u}`: {e}")))?;
                let s = fabric
                    .switch_index(uuid)
                    .ok_or_else(|| ParseError::new(n, format!("unknown switch {uuid}")))?;
                if std::mem::replace(&mut seen[s as usize], true) {
                    return Err(ParseError::new(n, format!("switch {uuid} listed twice")));
                }
                current = Some(s as usize);
                continue;
            }
            let s = current.ok_or_else(|| ParseError::new(n, "entry before any switch line"))?;
            let (t, p) = line
                .split_once(' ')
                .ok_or_else(|| ParseError::new(n, format!("expected `<nid> <port>`, got `{line}`")))?;
            let t: usize = t.parse().map_err(|e| ParseError::new(n, format!("bad nid `{t}`: {e}")))?;
            if t >= nid_count {
                return Err(ParseError::new(n, format!("nid {t} out of range (fabric has {nid_count} nodes)")));
            }
            let p = p.trim();
            let port = if p == "-1" {
                NO_ROUTE
            } else {
                let port: u16 = p.parse().map_err(|e| ParseError::new(n, format!("bad port `{p}`: {e}")))?;
                if port as usize >= fabric.ports(s as u32).len() {
                    return Err(ParseError::new(n, format!("port {port} does not exist")));
                }
                port
            };
            tables[s].ports[t] = port;
        }
        let uuids = (0..fabric.switch_count() as u32).map(|s| fabric.switch_uuid(s)).collect();
        Ok(Lft::new(uuids, tables, Vec::new(), nid_count))
    }

    /// SHA-256 over switch UUIDs and port entries, hex encoded.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        for (uuid, table) in self.switch_uuids.iter().zip(&self.tables) {
            h.update(uuid.0.to_le_bytes());
            let bytes: Vec<u8> = table.ports.iter().flat_map(|p| p.to_le_bytes()).collect();
            h.update(&bytes);
        }
        hex::encode(h.finalize())
    }

    /// Whether both tables route every destination identically.
    pub fn same_routes(&self, other: &Lft) -> bool {
        self.switch_uuids == other.switch_uuids && self.tables.iter().zip(&other.tables).all(|(a, b)| a.ports == b.ports)
    }
}
