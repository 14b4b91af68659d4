use rayon::prelude::*;

use super::fabric::Fabric;
use super::groups::PortGroupTable;
use super::ranks::Ranks;

/// Marks an infinite cost.
pub const UNREACHABLE: u32 = u32::MAX;

/// Up–down hop counts from every switch to every leaf switch.
///
/// Leaves are stored as columns in UUID order. Alongside the final costs the
/// matrix keeps the descent-only costs left by the upward sweep: the length
/// of the shortest strictly downward path from a switch to a leaf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostMatrix {
    leaves: Vec<u32>,
    column: Vec<u32>,
    cost: Vec<u32>,
    descent: Vec<u32>,
}

impl CostMatrix {
    /// Leaf switches, in UUID order.
    pub fn leaves(&self) -> &[u32] {
        &self.leaves
    }

    /// Column of a leaf switch, if `s` is one.
    pub fn column(&self, s: u32) -> Option<u32> {
        let c = self.column[s as usize];
        (c != UNREACHABLE).then_some(c)
    }

    pub fn width(&self) -> usize {
        self.leaves.len()
    }

    /// Row of switch `s`, indexed by leaf column; [`UNREACHABLE`] for infinity.
    pub fn row(&self, s: u32) -> &[u32] {
        let w = self.width();
        &self.cost[s as usize * w..(s as usize + 1) * w]
    }

    pub fn descent_row(&self, s: u32) -> &[u32] {
        let w = self.width();
        &self.descent[s as usize * w..(s as usize + 1) * w]
    }

    /// Cost of switch `s` to the leaf in column `col`.
    pub fn get(&self, s: u32, col: u32) -> Option<u32> {
        let c = self.row(s)[col as usize];
        (c != UNREACHABLE).then_some(c)
    }
}

/// Per-switch divider: the product of up-to-date counts of upper switches
/// along the way up from the leaves, with a max reduction where branches meet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DividerMap {
    values: Vec<u64>,
}

impl DividerMap {
    pub fn get(&self, s: u32) -> u64 {
        self.values[s as usize]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.values
    }
}

/// Runs the upward then downward relaxation sweeps.
///
/// Both sweeps are written as pulls: a switch of rank `r` reads the finished
/// rows of its neighbours at rank `r - 1` (upwards) or `r + 1` (downwards).
/// Within a rank the switches are independent, so each level is computed in
/// parallel; min and max reductions make the result order-free.
pub fn compute_costs_dividers(fabric: &Fabric, ranks: &Ranks, groups: &PortGroupTable) -> (CostMatrix, DividerMap) {
    let n = fabric.switch_count();
    let leaves: Vec<u32> = ranks.level(1).to_vec();
    let width = leaves.len();
    let mut column = vec![UNREACHABLE; n];
    for (c, &l) in leaves.iter().enumerate() {
        column[l as usize] = c as u32;
    }

    let mut cost = vec![UNREACHABLE; n * width];
    let mut divider = vec![1u64; n];
    for (c, &l) in leaves.iter().enumerate() {
        cost[l as usize * width + c] = 0;
    }

    let relax = |row: &mut [u32], from: &[u32]| {
        for (dst, &src) in row.iter_mut().zip(from) {
            let via = src.saturating_add(1);
            if via < *dst {
                *dst = via;
            }
        }
    };

    // upward: pull from the switches below
    for r in 2..=ranks.max_rank() {
        let updates: Vec<(u32, Vec<u32>, u64)> = ranks
            .level(r)
            .par_iter()
            .map(|&s| {
                let mut row = cost[s as usize * width..(s as usize + 1) * width].to_vec();
                let mut pi = divider[s as usize];
                for g in groups.down_groups(s) {
                    let below = g.remote as usize;
                    relax(&mut row, &cost[below * width..(below + 1) * width]);
                    pi = pi.max(divider[below] * groups.up_count(g.remote) as u64);
                }
                (s, row, pi)
            })
            .collect();
        for (s, row, pi) in updates {
            cost[s as usize * width..(s as usize + 1) * width].copy_from_slice(&row);
            divider[s as usize] = pi;
        }
    }
    let descent = cost.clone();

    // downward: pull from the switches above
    for r in (1..ranks.max_rank()).rev() {
        let updates: Vec<(u32, Vec<u32>)> = ranks
            .level(r)
            .par_iter()
            .map(|&s| {
                let mut row = cost[s as usize * width..(s as usize + 1) * width].to_vec();
                for g in groups.up_groups(s) {
                    let above = g.remote as usize;
                    relax(&mut row, &cost[above * width..(above + 1) * width]);
                }
                (s, row)
            })
            .collect();
        for (s, row) in updates {
            cost[s as usize * width..(s as usize + 1) * width].copy_from_slice(&row);
        }
    }

    (
        CostMatrix {
            leaves,
            column,
            cost,
            descent,
        },
        DividerMap { values: divider },
    )
}

/// Outcome of the all-pairs leaf reachability check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validity {
    Valid,
    /// Leaf switch pairs (by switch index, lower first) without an up–down path.
    Invalid(Vec<(u32, u32)>),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

pub fn check_validity(costs: &CostMatrix) -> Validity {
    let leaves = costs.leaves();
    let mut bad = Vec::new();
    for (i, &a) in leaves.iter().enumerate() {
        for (j, &b) in leaves.iter().enumerate().skip(i + 1) {
            if costs.get(a, j as u32).is_none() || costs.get(b, i as u32).is_none() {
                bad.push((a, b));
            }
        }
    }
    if bad.is_empty() {
        Validity::Valid
    } else {
        Validity::Invalid(bad)
    }
}
