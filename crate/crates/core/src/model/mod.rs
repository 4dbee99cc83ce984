//! Networks, growth histories and their tree encodings.

mod bucket;
mod coloured;
mod distribution;
mod history;
mod network;

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

pub use bucket::{Bucket, BucketRecursiveTree, BucketSpec, Side};
pub use coloured::{Colour, ColouredRecursiveTree};
pub use distribution::{DiscreteDistribution, Provenance, NEGATIVE_CLAMP};
pub use history::{Doubling, GrowthHistory, HistoryFile, Model, ModelKind, Step};
pub use network::{Edge, Invariant, SpNetwork, Violation, Witness};

/// Node identifier. Poles have fixed ids; internal nodes count up from 1 in
/// creation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub i64);

impl NodeId {
    pub const SOURCE: NodeId = NodeId(0);
    pub const SINK: NodeId = NodeId(-1);

    pub fn internal(k: usize) -> NodeId {
        NodeId(k as i64)
    }

    pub fn is_pole(self) -> bool {
        self.0 <= 0
    }

    /// Dense index: source 0, sink 1, internal `k` at `k + 1`.
    pub(crate) fn slot(self) -> Option<usize> {
        match self.0 {
            0 => Some(0),
            -1 => Some(1),
            k if k > 0 => Some(k as usize + 1),
            _ => None,
        }
    }

    pub(crate) fn from_slot(slot: usize) -> NodeId {
        match slot {
            0 => NodeId::SOURCE,
            1 => NodeId::SINK,
            s => NodeId(s as i64 - 1),
        }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => f.write_str("source"),
            -1 => f.write_str("sink"),
            k => write!(f, "{k}"),
        }
    }
}

impl FromStr for NodeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<NodeId, Error> {
        match s {
            "source" => Ok(NodeId::SOURCE),
            "sink" => Ok(NodeId::SINK),
            _ => match s.parse::<i64>() {
                Ok(k) if k > 0 => Ok(NodeId(k)),
                Ok(k) => Err(Error::InvalidNode(NodeId(k))),
                Err(_) => Err(Error::Format(format!("bad node id {s:?}"))),
            },
        }
    }
}
