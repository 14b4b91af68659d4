use thiserror::Error;

use super::lft::Lft;
use crate::preprocess::{Fabric, PortTarget};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hop {
    pub switch: u32,
    pub port: u16,
}

/// Switches crossed from the source's leaf to the destination's leaf, each
/// with the port the packet leaves through.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RouteTrace {
    pub hops: Vec<Hop>,
}

impl RouteTrace {
    pub fn switches(&self) -> impl Iterator<Item = u32> + '_ {
        self.hops.iter().map(|h| h.switch)
    }

    /// Number of switch-to-switch cables crossed.
    pub fn cable_hops(&self) -> usize {
        self.hops.len().saturating_sub(1)
    }
}

/// A walk that failed; every variant keeps the hops taken so far.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("no route at switch index {switch} after {} hops", partial.hops.len())]
    DeadEnd { switch: u32, partial: RouteTrace },
    #[error("forwarding loop after {} hops", partial.hops.len())]
    Loop { partial: RouteTrace },
    #[error("delivered to node index {node} instead")]
    Misdelivered { node: u32, partial: RouteTrace },
}

/// Follows `lft` from node `src` to node `dst` (fabric node indices).
///
/// `max_switches` bounds the walk; exceeding it reports a loop. Any bound at
/// least the fabric's switch count detects every loop.
pub fn trace(fabric: &Fabric, lft: &Lft, nid_of_dst: u32, src: u32, dst: u32, max_switches: usize) -> Result<RouteTrace, TraceError> {
    let mut hops = Vec::new();
    let (mut s, _) = fabric.attachment(src);
    loop {
        if hops.len() >= max_switches {
            return Err(TraceError::Loop {
                partial: RouteTrace { hops },
            });
        }
        let Some(port) = lft.port(s, nid_of_dst) else {
            return Err(TraceError::DeadEnd {
                switch: s,
                partial: RouteTrace { hops },
            });
        };
        hops.push(Hop { switch: s, port });
        match fabric.port(s, port) {
            PortTarget::Node(n) if n == dst => return Ok(RouteTrace { hops }),
            PortTarget::Node(n) => {
                return Err(TraceError::Misdelivered {
                    node: n,
                    partial: RouteTrace { hops },
                })
            }
            PortTarget::Switch { switch, .. } => s = switch,
            PortTarget::Unlinked => {
                return Err(TraceError::DeadEnd {
                    switch: s,
                    partial: RouteTrace { hops },
                })
            }
        }
    }
}
