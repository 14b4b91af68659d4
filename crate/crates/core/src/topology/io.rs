//! Line-based topology files.
//!
//! ```text
//! topo v1
//! pgft PGFT(3;2.2.3;1.2.2;1.2.1)
//! switch 000000000000000d
//! node 0000000000000001 leaf=000000000000000d port=0
//! link 0000000000000001:0 000000000000000d:0
//! removed link 000000000000000d:2 0000000000000013:0
//! removed switch 0000000000000013
//! ```
//!
//! Every physical link, node cables included, appears once with the lower
//! endpoint first. `removed` lines replay the degradation journal in order.

use std::collections::HashSet;
use std::fmt::Write as _;

use super::{Endpoint, Link, PgftParams, Removal, Topology, Uuid};
use crate::error::ParseError;

pub const HEADER: &str = "topo v1";

impl Topology {
    pub fn save(&self) -> String {
        let mut out = String::new();
        out.push_str(HEADER);
        out.push('\n');
        if let Some(p) = self.provenance() {
            writeln!(out, "pgft {p}").unwrap();
        }
        for s in self.switches() {
            writeln!(out, "switch {}", s.uuid).unwrap();
        }
        for n in self.nodes() {
            writeln!(out, "node {} leaf={} port={}", n.uuid, n.leaf.uuid, n.leaf.port).unwrap();
        }
        for l in self.links() {
            writeln!(out, "link {} {}", l.a, l.b).unwrap();
        }
        for r in self.journal() {
            match r {
                Removal::Switch(u) => writeln!(out, "removed switch {u}").unwrap(),
                Removal::Link(l) => writeln!(out, "removed link {} {}", l.a, l.b).unwrap(),
            }
        }
        out
    }

    pub fn load(text: &str) -> Result<Topology, ParseError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        match lines.next() {
            Some((_, HEADER)) => {}
            Some((n, other)) => return Err(ParseError::new(n, format!("expected `{HEADER}`, got `{other}`"))),
            None => return Err(ParseError::new(1, "empty topology file")),
        }

        let mut provenance = None;
        let mut switches = Vec::new();
        let mut nodes = Vec::new();
        let mut links = Vec::new();
        let mut journal = Vec::new();

        for (n, line) in lines {
            let mut words = line.split_whitespace();
            let keyword = words.next().unwrap_or_default();
            let rest: Vec<&str> = words.collect();
            let err = |msg: String| ParseError::new(n, msg);
            let uuid = |s: &str| s.parse::<Uuid>().map_err(|e| err(format!("bad uuid `{s}`: {e}")));
            let endpoint = |s: &str| s.parse::<Endpoint>().map_err(err);
            let arity = |want: usize| {
                if rest.len() == want {
                    Ok(())
                } else {
                    Err(err(format!("`{keyword}` expects {want} fields, got {}", rest.len())))
                }
            };
            match keyword {
                "pgft" => {
                    arity(1)?;
                    provenance = Some(rest[0].parse::<PgftParams>().map_err(|e| err(e.to_string()))?);
                }
                "switch" => {
                    arity(1)?;
                    switches.push((n, uuid(rest[0])?));
                }
                "node" => {
                    arity(3)?;
                    let leaf = rest[1].strip_prefix("leaf=").ok_or_else(|| err("expected leaf=<uuid>".into()))?;
                    let port = rest[2].strip_prefix("port=").ok_or_else(|| err("expected port=<idx>".into()))?;
                    let port = port.parse::<u16>().map_err(|e| err(format!("bad port `{port}`: {e}")))?;
                    nodes.push((n, uuid(rest[0])?, Endpoint::new(uuid(leaf)?, port)));
                }
                "link" => {
                    arity(2)?;
                    links.push((n, Link::new(endpoint(rest[0])?, endpoint(rest[1])?)));
                }
                "removed" => match rest.first().copied() {
                    Some("switch") if rest.len() == 2 => journal.push(Removal::Switch(uuid(rest[1])?)),
                    Some("link") if rest.len() == 3 => journal.push(Removal::Link(Link::new(endpoint(rest[1])?, endpoint(rest[2])?))),
                    _ => return Err(err(format!("malformed removal `{line}`"))),
                },
                other => return Err(err(format!("unknown record `{other}`"))),
            }
        }

        let mut topo = Topology::new();
        topo.set_provenance(provenance);
        for (n, u) in switches {
            topo.add_switch(u, 0).map_err(|e| ParseError::new(n, e))?;
        }
        let mut node_links = HashSet::new();
        for (n, u, leaf) in nodes {
            if topo.switch(leaf.uuid).is_none() {
                return Err(ParseError::new(n, format!("unknown uuid {} in leaf=", leaf.uuid)));
            }
            topo.add_node(u, leaf).map_err(|e| ParseError::new(n, e))?;
            node_links.insert(Link::new(Endpoint::new(u, 0), leaf));
        }
        let mut seen_node_links = HashSet::new();
        for (n, link) in links {
            for end in [link.a, link.b] {
                if topo.switch(end.uuid).is_none() && topo.node(end.uuid).is_none() {
                    return Err(ParseError::new(n, format!("unknown uuid {} in link", end.uuid)));
                }
            }
            let touches_node = topo.node(link.a.uuid).is_some() || topo.node(link.b.uuid).is_some();
            if touches_node {
                if !node_links.contains(&link) {
                    return Err(ParseError::new(
                        n,
                        format!("link {} {} disagrees with node records", link.a, link.b),
                    ));
                }
                seen_node_links.insert(link);
            } else {
                topo.connect(link.a, link.b).map_err(|e| ParseError::new(n, e))?;
            }
        }
        if let Some(missing) = node_links.difference(&seen_node_links).min() {
            return Err(ParseError::new(
                0,
                format!("node cable {} {} has no link record", missing.a, missing.b),
            ));
        }

        // cables lost to degradation still define the port count of surviving switches
        for entry in &journal {
            if let Removal::Link(l) = entry {
                for end in [l.a, l.b] {
                    if let Some(sw) = topo.switches.get_mut(&end.uuid) {
                        if sw.ports.len() <= end.port as usize {
                            sw.ports.resize(end.port as usize + 1, None);
                        }
                    }
                }
            }
        }
        topo.removed = journal;
        Ok(topo)
    }
}
