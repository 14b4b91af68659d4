use thiserror::Error;

use crate::topology::{Endpoint, Uuid};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TopologyError {
    #[error("invalid PGFT parameters: {0}")]
    InvalidParams(String),
    #[error("PGFT too large: {what} = {count} exceeds limit {limit}")]
    Overflow { what: &'static str, count: u128, limit: u128 },
    #[error("cannot remove {requested} {kind}: only {available} removable")]
    AmountTooLarge {
        kind: &'static str,
        requested: usize,
        available: usize,
    },
    #[error("asymmetric link at {0}")]
    Asymmetric(Endpoint),
    #[error("dangling link endpoint {0}")]
    Dangling(Endpoint),
    #[error("node {0} is not attached to a switch")]
    Detached(Uuid),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RouteError {
    /// A switch with a finite cost towards a leaf found no neighbour closer to it.
    #[error("switch {switch} has cost {cost} to leaf {leaf} but no closer neighbour")]
    NoCloserGroup { switch: Uuid, leaf: Uuid, cost: u32 },
}
