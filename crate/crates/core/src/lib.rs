//! Deterministic, fault-resilient routing for parallel generalized fat-trees.

pub mod error;
pub mod topology;

pub use error::{ParseError, RouteError, TopologyError};
pub use topology::{Endpoint, EquipmentKind, Link, Node, PgftParams, Removal, Switch, Topology, Uuid, UuidMode};
pub mod preprocess;

pub use preprocess::Preprocessed;
pub mod router;
pub use router::{Algorithm, Lft};
pub mod analysis;
pub use analysis::{CongestionReport, Flow, Pattern, PortLoad, SpOrder};
pub mod harness;
pub use harness::{ExperimentRecord, SweepConfig, ThrowSpec};
