//! Random series-parallel networks grown by edge duplication.
//!
//! Two growth rules are covered: the Bernoulli model, where a uniformly chosen
//! edge is doubled in parallel with probability `p` and serially otherwise,
//! and the binary saturation model, where the tail's out-degree decides. Each
//! run is a [`GrowthHistory`] that replays into an [`SpNetwork`] and into a
//! tree encoding ([`ColouredRecursiveTree`] or [`BucketRecursiveTree`]).
//!
//! Exact laws for the pole degree, the leftmost path length and the expected
//! number of source-to-sink paths live in [`bernoulli`] and [`binary`];
//! limiting laws in [`limits`]. The [`oracle`] enumerates every history at
//! small sizes and [`montecarlo`] compares simulations against all of them.

pub mod bernoulli;
pub mod binary;
pub mod error;
pub mod growth;
pub mod limits;
pub mod model;
pub mod montecarlo;
pub mod oracle;
pub mod quadrature;
pub mod scalar;
pub mod stats;

pub use error::{Error, Result};
pub use growth::{grow, grow_tree_only, Grown, GrownTree, RngStream};
pub use model::{
    BucketRecursiveTree, Colour, ColouredRecursiveTree, DiscreteDistribution, Doubling, GrowthHistory, Model,
    ModelKind, NodeId, Provenance, SpNetwork, Step,
};
pub use scalar::{MpFloat, RealScalar, Scalar};

use num_rational::BigRational;

/// Distribution with `f64` probabilities.
pub type Distribution = DiscreteDistribution<f64>;
/// Distribution with exact rational probabilities.
pub type ExactDistribution = DiscreteDistribution<BigRational>;

#[doc = include_str!("../../../README.md")]
#[cfg(doctest)]
pub struct ReadmeDoctests;
