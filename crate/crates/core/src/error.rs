use thiserror::Error;

use crate::model::NodeId;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parallel-doubling probability must lie in (0, 1), got {0}")]
    InvalidProbability(f64),

    #[error("network size must be at least 1")]
    EmptySize,

    #[error("step {step} chooses edge {edge}, but only edges 1..={available} exist")]
    EdgeOutOfRange { step: usize, edge: u32, available: u32 },

    #[error("step {step} records a {recorded} doubling but the saturation rule forces {forced}")]
    InconsistentDoubling { step: usize, recorded: &'static str, forced: &'static str },

    #[error("invalid node id {0:?}: poles are 0 and -1, internal nodes are positive")]
    InvalidNode(NodeId),

    #[error("tree is malformed: {0}")]
    MalformedTree(String),

    #[error("distribution is invalid: {0}")]
    InvalidDistribution(String),

    #[error(
        "working precision of {available} bits is insufficient (cancellation of {cancellation_bits:.1} bits); \
         at least {required} bits are needed"
    )]
    InsufficientPrecision { available: u32, required: u32, cancellation_bits: f64 },

    #[error(
        "quadrature did not reach tolerance {tolerance:e}: achieved error {achieved:e} after {evaluations} evaluations"
    )]
    QuadratureBudget { tolerance: f64, achieved: f64, evaluations: usize },

    #[error("coefficient-ratio extrapolation did not converge: {0}")]
    NonConvergent(String),

    #[error("enumeration of {model} histories at n = {n} exceeds the cap n <= {cap} ({histories} histories)")]
    EnumerationCap { model: &'static str, n: usize, cap: usize, histories: String },

    #[error("batch of {requested} trials exceeds the network budget; at most {feasible} fit")]
    ResourceCap { requested: usize, feasible: usize },

    #[error("goodness-of-fit test needs at least 2 pooled bins, got {0}")]
    TooFewBins(usize),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
