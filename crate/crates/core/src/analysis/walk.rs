use crate::preprocess::{Fabric, NidMap, PortTarget};
use crate::router::Lft;

/// Follows forwarding tables hop by hop and records directed port ids.
pub(crate) struct Walker<'a> {
    pub fabric: &'a Fabric,
    pub lft: &'a Lft,
    pub nids: &'a NidMap,
}

impl Walker<'_> {
    /// Fills `path` with the directed ports from NID `src` to NID `dst`,
    /// starting with the source node's own port. Returns false, leaving a
    /// partial path, when the walk dead-ends, loops or misdelivers.
    pub fn walk(&self, src: u32, dst: u32, path: &mut Vec<u32>) -> bool {
        path.clear();
        let from = self.nids.node(src);
        let to = self.nids.node(dst);
        path.push(self.fabric.node_port_id(from));
        let (mut s, _) = self.fabric.attachment(from);
        for _ in 0..self.fabric.switch_count() {
            let Some(p) = self.lft.port(s, dst) else {
                return false;
            };
            path.push(self.fabric.switch_port_id(s, p));
            match self.fabric.port(s, p) {
                PortTarget::Node(n) => return n == to,
                PortTarget::Switch { switch, .. } => s = switch,
                PortTarget::Unlinked => return false,
            }
        }
        false
    }

    pub fn port_count(&self) -> usize {
        self.fabric.directed_port_count()
    }
}

/// Per directed port, how many distinct keys (sources or destinations)
/// have a valid flow crossing it, plus flow tallies.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct Tally {
    pub counts: Vec<u32>,
    pub valid: u64,
    pub invalid: u64,
}

impl Tally {
    pub fn new(ports: usize) -> Self {
        Tally {
            counts: vec![0; ports],
            valid: 0,
            invalid: 0,
        }
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self.valid += other.valid;
        self.invalid += other.invalid;
        self
    }
}

/// Scratch state reused across keys by one worker.
pub(crate) struct Scratch {
    stamp: Vec<u32>,
    path: Vec<u32>,
    partners: Vec<u32>,
}

impl Scratch {
    pub fn new(ports: usize) -> Self {
        Scratch {
            stamp: vec![u32::MAX; ports],
            path: Vec::new(),
            partners: Vec::new(),
        }
    }
}

/// Adds to `tally` the flows of every key in `keys`. A key is a source NID
/// when `key_is_src`, a destination NID otherwise; `partners` lists the
/// other endpoint of each of its flows. Each port counts a key at most once,
/// and flows failing the walk touch nothing.
pub(crate) fn tally_keys(
    w: &Walker<'_>,
    keys: impl Iterator<Item = u32>,
    key_is_src: bool,
    partners: &(dyn Fn(u32, &mut Vec<u32>) + Sync),
    scratch: &mut Scratch,
    tally: &mut Tally,
) {
    for key in keys {
        scratch.partners.clear();
        partners(key, &mut scratch.partners);
        for i in 0..scratch.partners.len() {
            let other = scratch.partners[i];
            let (src, dst) = if key_is_src { (key, other) } else { (other, key) };
            if !w.walk(src, dst, &mut scratch.path) {
                tally.invalid += 1;
                continue;
            }
            tally.valid += 1;
            for &port in &scratch.path {
                let stamp = &mut scratch.stamp[port as usize];
                if *stamp != key {
                    *stamp = key;
                    tally.counts[port as usize] += 1;
                }
            }
        }
    }
}
