//! The length of a uniformly random source-to-sink walk has the law of the
//! leftmost path length, checked exactly over all histories.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use splab::model::{Doubling, ModelKind, NodeId, SpNetwork};
use splab::oracle::{enumerate, for_each_history, history_count, Parameter};
use splab::scalar::parse_rational;

type Law = BTreeMap<u64, BigRational>;

/// Exact law of the walk length from `node`, memoised by node.
fn walk_law(net: &SpNetwork, node: NodeId, memo: &mut BTreeMap<NodeId, Law>) -> Law {
    if node == NodeId::SINK {
        return Law::from([(0, BigRational::one())]);
    }
    if let Some(law) = memo.get(&node) {
        return law.clone();
    }
    let out = net.out_edges(node);
    let weight = BigRational::new(1.into(), (out.len() as i64).into());
    let mut law = Law::new();
    for &label in out {
        let to = net.edge(label).unwrap().to;
        for (len, p) in walk_law(net, to, memo) {
            *law.entry(len + 1).or_insert_with(BigRational::zero) += &weight * p;
        }
    }
    memo.insert(node, law.clone());
    law
}

/// Random-walk law averaged over histories, each weighted by `weight(steps)`.
fn averaged_walk_law(model: ModelKind, n: usize, weight: impl Fn(usize) -> BigRational) -> Law {
    let mut total = Law::new();
    for_each_history(model, n, |steps, net| {
        let parallel = steps.iter().filter(|s| s.doubling == Doubling::Parallel).count();
        let w = weight(parallel);
        for (len, p) in walk_law(net, NodeId::SOURCE, &mut BTreeMap::new()) {
            *total.entry(len).or_insert_with(BigRational::zero) += &w * p;
        }
    })
    .unwrap();
    total
}

fn as_law(d: &splab::ExactDistribution) -> Law {
    d.iter().filter(|(_, p)| !p.is_zero()).map(|(m, p)| (m, p.clone())).collect()
}

#[test]
fn binary_walk_length_matches_leftmost() {
    for n in 1..=8 {
        let count = BigRational::from_integer(history_count(ModelKind::Binary, n).into());
        let walk = averaged_walk_law(ModelKind::Binary, n, |_| BigRational::one() / &count);
        let leftmost = enumerate(ModelKind::Binary, n, None).unwrap().marginal(Parameter::LeftmostLength);
        assert_eq!(walk, as_law(&leftmost), "n = {n}");
    }
}

#[test]
fn bernoulli_walk_length_matches_leftmost() {
    let p = parse_rational("1/3").unwrap();
    let q = BigRational::one() - &p;
    for n in 1..=6 {
        let choices = BigRational::from_integer((1..n as i64).product::<i64>().into());
        let weight = |parallel: usize| {
            num_traits::pow(p.clone(), parallel) * num_traits::pow(q.clone(), n - 1 - parallel) / &choices
        };
        let walk = averaged_walk_law(ModelKind::Bernoulli, n, weight);
        let leftmost = enumerate(ModelKind::Bernoulli, n, Some(&p)).unwrap().marginal(Parameter::LeftmostLength);
        assert_eq!(walk, as_law(&leftmost), "n = {n}");
    }
}
