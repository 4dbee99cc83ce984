//! Parameters of a network, read off the graph or its tree encoding.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::growth::RngStream;
use crate::model::{BucketRecursiveTree, Colour, ColouredRecursiveTree, NodeId, Side, SpNetwork};

/// Out-degree of the source.
pub fn source_degree(net: &SpNetwork) -> usize {
    net.out_degree(NodeId::SOURCE)
}

/// In-degree of the sink.
pub fn sink_degree(net: &SpNetwork) -> usize {
    net.in_degree(NodeId::SINK)
}

/// Order of the root subtree reachable along blue edges; equals the source degree.
pub fn blue_subtree_order(tree: &ColouredRecursiveTree) -> usize {
    tree.monochrome_subtree_order(Colour::Blue)
}

/// Order of the root subtree reachable along red edges; equals the leftmost path length.
pub fn red_subtree_order(tree: &ColouredRecursiveTree) -> usize {
    tree.monochrome_subtree_order(Colour::Red)
}

/// Edges on the path that always leaves a node by its first out-edge.
pub fn leftmost_path_length(net: &SpNetwork) -> usize {
    walk(net, |_| 0)
}

/// Length of a walk choosing uniformly among out-edges. Nodes with a single
/// out-edge consume no randomness.
pub fn random_path_length(net: &SpNetwork, rng: &mut RngStream) -> usize {
    walk(net, |degree| rng.below(degree as u32) as usize)
}

fn walk(net: &SpNetwork, mut pick: impl FnMut(usize) -> usize) -> usize {
    let mut node = NodeId::SOURCE;
    let mut length = 0;
    while node != NodeId::SINK {
        let out = net.out_edges(node);
        let i = if out.len() > 1 { pick(out.len()) } else { 0 };
        node = net.edge(out[i]).expect("valid network").to;
        length += 1;
    }
    length
}

fn count_paths_with<T: Clone + Zero + One>(net: &SpNetwork, mut add: impl FnMut(&T, &T) -> Option<T>) -> Option<T> {
    let order = net.topological_slots().expect("network is acyclic");
    let out = net.out_by_slot();
    let mut paths: Vec<T> = vec![T::zero(); out.len()];
    paths[1] = T::one();
    for &s in order.iter().rev() {
        if s == 1 {
            continue;
        }
        let mut total = T::zero();
        for &label in &out[s] {
            let t = net.edge(label)?.to.slot()?;
            total = add(&total, &paths[t])?;
        }
        paths[s] = total;
    }
    Some(paths[0].clone())
}

/// Exact number of source-to-sink paths.
pub fn count_paths(net: &SpNetwork) -> BigUint {
    count_paths_with(net, |a: &BigUint, b| Some(a + b)).expect("valid network")
}

/// Path count in machine integers; `None` on overflow.
pub fn count_paths_u64(net: &SpNetwork) -> Option<u64> {
    count_paths_with(net, |a: &u64, b| a.checked_add(*b))
}

/// Bottom-up fold over buckets: `leaf` for one-label buckets, `pair` for
/// full ones given the child values of the left and right forests.
fn fold_buckets<T: Clone>(tree: &BucketRecursiveTree, leaf: impl Fn() -> T, pair: impl Fn(&[&T], &[&T]) -> T) -> T {
    let buckets = tree.buckets();
    let mut value: Vec<Option<T>> = vec![None; buckets.len()];
    for i in (0..buckets.len()).rev() {
        let b = &buckets[i];
        value[i] = Some(if b.is_saturated() {
            let get = |side| b.forest(side).iter().map(|&c| value[c].as_ref().unwrap()).collect::<Vec<_>>();
            pair(&get(Side::Left), &get(Side::Right))
        } else {
            leaf()
        });
    }
    value.swap_remove(0).unwrap()
}

/// Leftmost path length from the bucket tree: one for the root plus the
/// left-path lengths of the trees in the left forest.
pub fn tree_leftmost_length_binary(tree: &BucketRecursiveTree) -> usize {
    fold_buckets(tree, || 1, |left, _| 1 + left.iter().copied().sum::<usize>())
}

/// Sink degree from the bucket tree: each half contributes 1 if its forest
/// is empty and the contribution of its earliest tree otherwise.
pub fn tree_sink_degree_binary(tree: &BucketRecursiveTree) -> usize {
    let half = |forest: &[&usize]| forest.first().map_or(1, |&&d| d);
    fold_buckets(tree, || 1, |left, right| half(left) + half(right))
}

/// Path count from the bucket tree: each half is a series of blocks, the
/// two halves are in parallel.
pub fn tree_path_count_binary(tree: &BucketRecursiveTree) -> BigUint {
    let series = |forest: &[&BigUint]| forest.iter().fold(BigUint::one(), |acc, &p| acc * p);
    fold_buckets(tree, BigUint::one, |left, right| series(left) + series(right))
}

/// The studied parameters of one network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterSample {
    pub n: usize,
    pub source_degree: usize,
    pub sink_degree: usize,
    pub leftmost_path_length: usize,
    pub random_path_length: Option<usize>,
    pub path_count: BigUint,
}

impl ParameterSample {
    pub const CSV_HEADER: &'static str = "n,source_degree,sink_degree,leftmost_len,random_len,path_count";

    pub fn of(net: &SpNetwork, rng: Option<&mut RngStream>) -> ParameterSample {
        ParameterSample {
            n: net.size(),
            source_degree: source_degree(net),
            sink_degree: sink_degree(net),
            leftmost_path_length: leftmost_path_length(net),
            random_path_length: rng.map(|r| random_path_length(net, r)),
            path_count: count_paths(net),
        }
    }

    /// One CSV row; an undrawn random length is left empty.
    pub fn csv_row(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ParameterSample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let random = self.random_path_length.map(|l| l.to_string()).unwrap_or_default();
        write!(
            f,
            "{},{},{},{},{},{}",
            self.n, self.source_degree, self.sink_degree, self.leftmost_path_length, random, self.path_count
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BucketSpec, GrowthHistory, Model, Step};

    fn bern(steps: Vec<Step>) -> SpNetwork {
        SpNetwork::replay(&GrowthHistory::new(Model::bernoulli(0.5).unwrap(), steps).unwrap()).unwrap()
    }

    #[test]
    fn small_networks() {
        let single = bern(vec![]);
        assert_eq!((source_degree(&single), sink_degree(&single)), (1, 1));
        assert_eq!(leftmost_path_length(&single), 1);
        assert_eq!(count_paths(&single), BigUint::one());

        let double = bern(vec![Step::parallel(1)]);
        assert_eq!((source_degree(&double), sink_degree(&double)), (2, 2));
        assert_eq!(count_paths_u64(&double), Some(2));

        assert_eq!(leftmost_path_length(&bern(vec![Step::serial(1)])), 2);
    }

    #[test]
    fn first_caption_network() {
        use Step as S;
        let net =
            bern(vec![S::parallel(1), S::serial(1), S::parallel(2), S::parallel(4), S::parallel(3), S::serial(5)]);
        assert_eq!(source_degree(&net), 4);
        assert_eq!(leftmost_path_length(&net), 2);
        assert_eq!(count_paths(&net), BigUint::from(5u32));
    }

    #[test]
    fn second_caption_network() {
        let h = GrowthHistory::binary_from_choices(&[1, 1, 2, 2, 5, 5]).unwrap();
        let net = SpNetwork::replay(&h).unwrap();
        let tree = BucketRecursiveTree::from_history(&h);
        assert_eq!(sink_degree(&net), 2);
        assert_eq!(leftmost_path_length(&net), 2);
        assert_eq!(count_paths(&net), BigUint::from(3u32));
        assert_eq!(tree_sink_degree_binary(&tree), 2);
        assert_eq!(tree_leftmost_length_binary(&tree), 2);
        assert_eq!(tree_path_count_binary(&tree), BigUint::from(3u32));
    }

    #[test]
    fn bucket_evaluators_on_small_trees() {
        let single = BucketRecursiveTree::single();
        assert_eq!(tree_leftmost_length_binary(&single), 1);
        assert_eq!(tree_sink_degree_binary(&single), 1);
        let pair = BucketRecursiveTree::from_spec(&BucketSpec::pair(1, 2, vec![], vec![])).unwrap();
        assert_eq!(tree_leftmost_length_binary(&pair), 1);
        assert_eq!(tree_sink_degree_binary(&pair), 2);
        let left = BucketRecursiveTree::from_spec(&BucketSpec::pair(1, 2, vec![BucketSpec::leaf(3)], vec![])).unwrap();
        assert_eq!(tree_leftmost_length_binary(&left), 2);
        assert_eq!(leftmost_path_length(&left.to_network()), 2);
    }

    #[test]
    fn random_walk_draws_only_at_branches() {
        let net = bern(vec![]);
        let mut rng = RngStream::new(3, 0);
        assert_eq!(random_path_length(&net, &mut rng), 1);
        let fresh = RngStream::new(3, 0);
        assert_eq!(rng.next_u32(), fresh.clone().next_u32());

        let parallel = bern(vec![Step::parallel(1)]);
        for _ in 0..20 {
            assert_eq!(random_path_length(&parallel, &mut rng), 1);
        }
    }

    #[test]
    fn random_walk_frequencies() {
        let net = bern(vec![Step::parallel(1), Step::serial(1)]);
        let mut rng = RngStream::new(11, 0);
        let trials = 100_000;
        let twos = (0..trials).filter(|_| random_path_length(&net, &mut rng) == 2).count();
        let sd = (trials as f64 * 0.25).sqrt();
        assert!((twos as f64 - trials as f64 / 2.0).abs() < 4.0 * sd);
    }

    #[test]
    fn csv_row_layout() {
        let net = bern(vec![Step::parallel(1)]);
        let s = ParameterSample::of(&net, None);
        assert_eq!(s.csv_row(), "2,2,2,1,,2");
        assert_eq!(ParameterSample::CSV_HEADER.split(',').count(), 6);
    }
}
