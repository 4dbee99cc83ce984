//! Seeded samplers for both growth rules.
//!
//! The generator is PCG-XSH-RR 64/32 (O'Neill's `pcg32`) seeded with
//! `(seed, stream_id)` exactly as the reference `pcg32_srandom_r`; see the
//! test vectors below. Each step draws the edge index first and then, for
//! the Bernoulli rule only, the parallel/serial coin.

use rand_core::RngCore;
use rand_pcg::Pcg32;

use crate::error::{Error, Result};
use crate::model::{
    BucketRecursiveTree, Colour, ColouredRecursiveTree, Doubling, GrowthHistory, Model, SpNetwork, Step,
};

/// Reproducible random stream. Equal `(seed, stream_id)` give equal draws
/// on every platform.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: Pcg32,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> RngStream {
        RngStream { seed, stream_id, rng: Pcg32::new(seed, stream_id) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    /// Uniform on `0..bound` by Lemire's multiply-and-reject method.
    pub fn below(&mut self, bound: u32) -> u32 {
        assert!(bound > 0, "empty range");
        let mut m = u64::from(self.next_u32()) * u64::from(bound);
        if (m as u32) < bound {
            let threshold = bound.wrapping_neg() % bound;
            while (m as u32) < threshold {
                m = u64::from(self.next_u32()) * u64::from(bound);
            }
        }
        (m >> 32) as u32
    }

    /// Uniform on `[0, 1)` with 53 random bits: two draws, the first one high.
    pub fn unit_f64(&mut self) -> f64 {
        let hi = u64::from(self.next_u32());
        let lo = u64::from(self.next_u32());
        (((hi << 32) | lo) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Tree encoding matching the model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GrownTree {
    Coloured(ColouredRecursiveTree),
    Bucket(BucketRecursiveTree),
}

impl GrownTree {
    pub fn order(&self) -> usize {
        match self {
            GrownTree::Coloured(t) => t.order(),
            GrownTree::Bucket(t) => t.order(),
        }
    }

    pub fn as_coloured(&self) -> Option<&ColouredRecursiveTree> {
        match self {
            GrownTree::Coloured(t) => Some(t),
            GrownTree::Bucket(_) => None,
        }
    }

    pub fn as_bucket(&self) -> Option<&BucketRecursiveTree> {
        match self {
            GrownTree::Bucket(t) => Some(t),
            GrownTree::Coloured(_) => None,
        }
    }

    pub fn to_network(&self) -> SpNetwork {
        match self {
            GrownTree::Coloured(t) => t.to_network(),
            GrownTree::Bucket(t) => t.to_network(),
        }
    }
}

/// A coupled sample: the history and both of its replays.
#[derive(Debug, Clone)]
pub struct Grown {
    pub history: GrowthHistory,
    pub tree: GrownTree,
    pub network: SpNetwork,
}

fn check(model: Model, n: usize) -> Result<()> {
    model.validate()?;
    if n == 0 {
        return Err(Error::EmptySize);
    }
    if n > u32::MAX as usize {
        return Err(Error::InvalidArgument(format!("size {n} exceeds the label range")));
    }
    Ok(())
}

fn sample(model: Model, n: usize, rng: &mut RngStream, mut record: impl FnMut(Step)) -> GrownTree {
    match model {
        Model::Bernoulli { p } => {
            let mut tree = ColouredRecursiveTree::single();
            for t in 1..n as u32 {
                let edge = rng.below(t) + 1;
                let doubling = if rng.unit_f64() < p { Doubling::Parallel } else { Doubling::Serial };
                tree.push(edge, Colour::from(doubling));
                record(Step { edge, doubling });
            }
            GrownTree::Coloured(tree)
        }
        Model::Binary => {
            let mut tree = BucketRecursiveTree::single();
            for t in 1..n as u32 {
                let edge = rng.below(t) + 1;
                let doubling = if tree.label_saturated(edge) { Doubling::Serial } else { Doubling::Parallel };
                tree.attach(edge);
                record(Step { edge, doubling });
            }
            GrownTree::Bucket(tree)
        }
    }
}

/// Grows a network of `n` edges together with its history and tree.
pub fn grow(model: Model, n: usize, rng: &mut RngStream) -> Result<Grown> {
    check(model, n)?;
    let mut network = SpNetwork::single_edge(model == Model::Binary);
    let mut steps = Vec::with_capacity(n - 1);
    let tree = sample(model, n, rng, |step| {
        network.push_step(step);
        steps.push(step);
    });
    let history = GrowthHistory::new(model, steps)?;
    Ok(Grown { history, tree, network })
}

/// Same draws as [`grow`], building only the tree.
pub fn grow_tree_only(model: Model, n: usize, rng: &mut RngStream) -> Result<GrownTree> {
    check(model, n)?;
    Ok(sample(model, n, rng, |_| {}))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pcg32_reference_vectors() {
        // Output of the reference pcg32 demo seeded with (42, 54).
        let mut rng = RngStream::new(42, 54);
        let got: Vec<u32> = (0..6).map(|_| rng.next_u32()).collect();
        assert_eq!(got, vec![0xa15c02b7, 0x7b47f409, 0xba1d3330, 0x83d2f293, 0xbfa4784b, 0xcbed606e]);
    }

    #[test]
    fn derived_draw_vectors() {
        let mut rng = RngStream::new(42, 54);
        // 0xa15c02b7 * 10 >> 32 = 6, 0x7b47f409 * 10 >> 32 = 4, ...
        let got: Vec<u32> = (0..4).map(|_| rng.below(10)).collect();
        assert_eq!(got, vec![6, 4, 7, 5]);
        let mut rng = RngStream::new(42, 54);
        let u = rng.unit_f64();
        let expect = ((0xa15c02b7u64 << 32 | 0x7b47f409) >> 11) as f64 / (1u64 << 53) as f64;
        assert_eq!(u, expect);
    }

    #[test]
    fn below_is_in_range() {
        let mut rng = RngStream::new(7, 0);
        for bound in [1u32, 2, 3, 7, 1 << 31, u32::MAX] {
            for _ in 0..100 {
                assert!(rng.below(bound) < bound);
            }
        }
    }

    #[test]
    fn size_one_and_binary_size_two() {
        for model in [Model::bernoulli(0.4).unwrap(), Model::Binary] {
            let g = grow(model, 1, &mut RngStream::new(1, 0)).unwrap();
            assert!(g.history.steps().is_empty());
            assert_eq!(g.network, SpNetwork::single_edge(model == Model::Binary));
        }
        for seed in 0..20 {
            let g = grow(Model::Binary, 2, &mut RngStream::new(seed, 0)).unwrap();
            assert_eq!(g.history.steps(), &[Step::parallel(1)]);
        }
    }

    #[test]
    fn parameter_errors() {
        let mut rng = RngStream::new(0, 0);
        assert!(matches!(grow(Model::Bernoulli { p: 1.5 }, 3, &mut rng), Err(Error::InvalidProbability(_))));
        assert!(matches!(grow(Model::Binary, 0, &mut rng), Err(Error::EmptySize)));
    }

    #[test]
    fn tree_only_matches_full_growth() {
        for model in [Model::bernoulli(0.3).unwrap(), Model::Binary] {
            for seed in 0..10 {
                let full = grow(model, 40, &mut RngStream::new(seed, 3)).unwrap();
                let tree = grow_tree_only(model, 40, &mut RngStream::new(seed, 3)).unwrap();
                assert_eq!(full.tree, tree);
                assert_eq!(full.network, SpNetwork::replay(&full.history).unwrap());
                assert_eq!(full.network, tree.to_network());
            }
        }
    }
}
