//! Shared fixtures for the benchmarks.

use dmodc_core::harness::scaling_preset;
use dmodc_core::preprocess::Preprocessed;
use dmodc_core::router::Algorithm;
use dmodc_core::topology::{EquipmentKind, Topology, UuidMode};

/// Intact scaling-preset fabric with `256·k` nodes.
pub fn fabric(k: u32) -> Topology {
    scaling_preset(k).build(UuidMode::Sequential).unwrap()
}

/// The same fabric with `links` random cables removed.
pub fn degraded(k: u32, links: usize) -> Topology {
    fabric(k).degrade(EquipmentKind::Links, links, 7).unwrap()
}

/// Preprocessing followed by one route computation.
pub fn pipeline(topo: &Topology, algo: Algorithm) -> usize {
    let pre = Preprocessed::run(topo);
    algo.route(&pre).unwrap().nid_count()
}
