use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Endpoint, Topology, Uuid};
use crate::error::TopologyError;

/// Upper bound on switches plus nodes accepted by [`PgftParams::build`].
pub const MAX_ELEMENTS: u128 = 1 << 24;

/// `PGFT(h; m1..mh; w1..wh; p1..ph)`: per level, the down-arity `m`, the
/// number of distinct parents `w` and the parallel-link count `p` between a
/// switch of the level below and each of its parents.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PgftParams {
    pub m: Vec<u32>,
    pub w: Vec<u32>,
    pub p: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UuidMode {
    /// Nodes first, then switches level by level, each left to right.
    Sequential,
    /// The sequential UUID values permuted by a seeded shuffle.
    Shuffled(u64),
}

impl PgftParams {
    pub fn new(m: Vec<u32>, w: Vec<u32>, p: Vec<u32>) -> Self {
        Self { m, w, p }
    }

    pub fn levels(&self) -> usize {
        self.m.len()
    }

    pub fn validate(&self) -> Result<(), TopologyError> {
        let h = self.m.len();
        if h == 0 {
            return Err(TopologyError::InvalidParams("at least one level required".into()));
        }
        if self.w.len() != h || self.p.len() != h {
            return Err(TopologyError::InvalidParams(format!(
                "m, w and p need {h} entries each (got {}, {}, {})",
                self.m.len(),
                self.w.len(),
                self.p.len()
            )));
        }
        if self.m.iter().chain(&self.w).chain(&self.p).any(|&x| x == 0) {
            return Err(TopologyError::InvalidParams("all arities must be >= 1".into()));
        }
        // nodes carry a single port
        if self.w[0] != 1 || self.p[0] != 1 {
            return Err(TopologyError::InvalidParams("nodes are single-ported: w1 and p1 must be 1".into()));
        }
        let total = self.node_count_wide() + (1..=h).map(|l| self.switch_count_wide(l)).sum::<u128>();
        if total > MAX_ELEMENTS {
            return Err(TopologyError::Overflow {
                what: "elements",
                count: total,
                limit: MAX_ELEMENTS,
            });
        }
        for l in 1..=h {
            let ports = self.port_count_wide(l);
            if ports >= u16::MAX as u128 {
                return Err(TopologyError::Overflow {
                    what: "ports per switch",
                    count: ports,
                    limit: u16::MAX as u128 - 1,
                });
            }
        }
        Ok(())
    }

    fn node_count_wide(&self) -> u128 {
        self.m.iter().map(|&x| x as u128).product()
    }

    fn switch_count_wide(&self, level: usize) -> u128 {
        let below: u128 = self.w[..level].iter().map(|&x| x as u128).product();
        let above: u128 = self.m[level..].iter().map(|&x| x as u128).product();
        below * above
    }

    fn port_count_wide(&self, level: usize) -> u128 {
        let down = self.m[level - 1] as u128 * self.p[level - 1] as u128;
        let up = if level < self.levels() {
            self.w[level] as u128 * self.p[level] as u128
        } else {
            0
        };
        down + up
    }

    pub fn node_count(&self) -> usize {
        self.node_count_wide() as usize
    }

    /// Number of switches at `level` (1 = leaves).
    pub fn switch_count(&self, level: usize) -> usize {
        self.switch_count_wide(level) as usize
    }

    /// Mixed radices of the digit tuple labelling elements of `level`
    /// (0 = nodes), least significant position first.
    fn radices(&self, level: usize) -> Vec<u64> {
        (1..=self.levels())
            .map(|pos| {
                if pos > level {
                    self.m[pos - 1] as u64
                } else {
                    self.w[pos - 1] as u64
                }
            })
            .collect()
    }

    /// Generates the fabric. Level-`l` switches carry digit tuples
    /// `(a_h..a_{l+1}, b_l..b_1)`; two switches on adjacent levels are linked
    /// (with `p_{l+1}` parallel cables) iff their tuples agree wherever both
    /// define a digit. Down ports come first on every switch, grouped per
    /// child in child order, followed by the up ports grouped per parent.
    pub fn build(&self, uuids: UuidMode) -> Result<Topology, TopologyError> {
        self.validate()?;
        let h = self.levels();

        let counts: Vec<usize> = std::iter::once(self.node_count())
            .chain((1..=h).map(|l| self.switch_count(l)))
            .collect();
        let mut base = Vec::with_capacity(h + 1);
        let mut total = 0u64;
        for &c in &counts {
            base.push(total);
            total += c as u64;
        }
        let mut values: Vec<u64> = (1..=total).collect();
        if let UuidMode::Shuffled(seed) = uuids {
            values.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        }
        let uuid = |level: usize, idx: usize| Uuid(values[(base[level] + idx as u64) as usize]);

        let mut topo = Topology::new();
        for level in 1..=h {
            let ports = self.port_count_wide(level) as usize;
            for idx in 0..counts[level] {
                topo.add_switch(uuid(level, idx), ports).expect("generated uuids are unique");
            }
        }

        for level in 0..h {
            let radices = self.radices(level);
            let pos = level; // digit position (0-based) replaced between level and level + 1
            let weight: u64 = radices[..pos].iter().product();
            let arity = radices[pos]; // m_{level+1}
            let parents = self.w[level] as u64;
            let parallel = self.p[level] as u64;
            let up_base = if level == 0 {
                0
            } else {
                self.m[level - 1] as u64 * self.p[level - 1] as u64
            };

            for idx in 0..counts[level] as u64 {
                let digit = (idx / weight) % arity;
                let low = idx % weight;
                let high = idx / (weight * arity);
                for b in 0..parents {
                    let parent = (low + b * weight + high * weight * parents) as usize;
                    for k in 0..parallel {
                        let down_port = (digit * parallel + k) as u16;
                        let parent_end = Endpoint::new(uuid(level + 1, parent), down_port);
                        if level == 0 {
                            topo.add_node(uuid(0, idx as usize), parent_end)
                                .expect("generated node ports are free");
                        } else {
                            let up_port = (up_base + b * parallel + k) as u16;
                            topo.connect(Endpoint::new(uuid(level, idx as usize), up_port), parent_end)
                                .expect("generated ports are free");
                        }
                    }
                }
            }
        }
        topo.set_provenance(Some(self.clone()));
        Ok(topo)
    }
}

impl fmt::Display for PgftParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(".");
        write!(f, "PGFT({};{};{};{})", self.levels(), join(&self.m), join(&self.w), join(&self.p))
    }
}

impl FromStr for PgftParams {
    type Err = TopologyError;

    /// Accepts `PGFT(3;2.2.3;1.2.2;1.2.1)` or the bare `3;2.2.3;1.2.2;1.2.1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |msg: String| TopologyError::InvalidParams(msg);
        let body = s.trim();
        let body = body.strip_prefix("PGFT(").and_then(|b| b.strip_suffix(')')).unwrap_or(body);
        let fields: Vec<&str> = body.split(';').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(bad(format!("expected h;m;w;p, got `{s}`")));
        }
        let h: usize = fields[0].parse().map_err(|_| bad(format!("bad level count `{}`", fields[0])))?;
        let list = |f: &str| -> Result<Vec<u32>, TopologyError> {
            f.split('.')
                .map(|x| x.trim().parse::<u32>().map_err(|_| bad(format!("bad arity `{x}`"))))
                .collect()
        };
        let params = PgftParams::new(list(fields[1])?, list(fields[2])?, list(fields[3])?);
        if params.levels() != h {
            return Err(bad(format!("{h} levels declared but {} given", params.levels())));
        }
        params.validate()?;
        Ok(params)
    }
}
