//! History, network and tree encodings agree on every small history and on
//! random large ones.

use splab::model::{BucketRecursiveTree, ColouredRecursiveTree, GrowthHistory, Model, ModelKind, SpNetwork};
use splab::oracle::for_each_history;
use splab::stats::{
    blue_subtree_order, count_paths, leftmost_path_length, red_subtree_order, sink_degree, source_degree,
    tree_leftmost_length_binary, tree_path_count_binary, tree_sink_degree_binary,
};
use splab::{grow, Grown, RngStream};

fn check_bernoulli(history: &GrowthHistory, net: &SpNetwork) {
    let tree = ColouredRecursiveTree::from_history(history);
    assert_eq!(&tree.to_network(), net);
    let Model::Bernoulli { p } = history.model() else { unreachable!() };
    assert_eq!(&tree.to_history(p).unwrap(), history);
    assert_eq!(blue_subtree_order(&tree), source_degree(net));
    assert_eq!(red_subtree_order(&tree), leftmost_path_length(net));
}

fn check_binary(history: &GrowthHistory, net: &SpNetwork) {
    let tree = BucketRecursiveTree::from_history(history);
    assert_eq!(&tree.to_network(), net);
    assert_eq!(&tree.to_history().unwrap(), history);
    assert_eq!(BucketRecursiveTree::from_spec(&tree.to_spec()).unwrap(), tree);
    assert_eq!(tree_leftmost_length_binary(&tree), leftmost_path_length(net));
    assert_eq!(tree_sink_degree_binary(&tree), sink_degree(net));
    assert_eq!(tree_path_count_binary(&tree), count_paths(net));
    assert_eq!(source_degree(net), net.size().min(2));
}

#[test]
fn every_bernoulli_history_up_to_six() {
    let model = Model::bernoulli(0.5).unwrap();
    for n in 1..=6 {
        let mut seen = 0;
        for_each_history(ModelKind::Bernoulli, n, |steps, net| {
            let history = GrowthHistory::new(model, steps.to_vec()).unwrap();
            assert_eq!(&SpNetwork::replay(&history).unwrap(), net);
            assert!(net.validate().is_empty());
            check_bernoulli(&history, net);
            seen += 1;
        })
        .unwrap();
        assert_eq!(seen, (1..n).product::<usize>() << (n - 1));
    }
}

#[test]
fn every_binary_history_up_to_seven() {
    for n in 1..=7 {
        let mut seen = 0;
        for_each_history(ModelKind::Binary, n, |steps, net| {
            let history = GrowthHistory::new(Model::Binary, steps.to_vec()).unwrap();
            assert_eq!(&SpNetwork::replay(&history).unwrap(), net);
            assert!(net.validate().is_empty());
            check_binary(&history, net);
            seen += 1;
        })
        .unwrap();
        assert_eq!(seen, (1..n).product::<usize>());
    }
}

fn check_grown(g: &Grown) {
    assert_eq!(g.tree.to_network(), g.network);
    assert_eq!(SpNetwork::replay(&g.history).unwrap(), g.network);
    match g.history.model() {
        Model::Bernoulli { .. } => check_bernoulli(&g.history, &g.network),
        Model::Binary => check_binary(&g.history, &g.network),
    }
}

#[test]
fn random_histories_at_one_hundred() {
    for t in 0..5_000 {
        let mut rng = RngStream::new(11, t);
        check_grown(&grow(Model::bernoulli(0.3).unwrap(), 100, &mut rng).unwrap());
        let mut rng = RngStream::new(12, t);
        check_grown(&grow(Model::Binary, 100, &mut rng).unwrap());
    }
}

#[test]
fn growth_is_reproducible_per_stream() {
    let a = grow(Model::Binary, 60, &mut RngStream::new(5, 9)).unwrap();
    let b = grow(Model::Binary, 60, &mut RngStream::new(5, 9)).unwrap();
    let c = grow(Model::Binary, 60, &mut RngStream::new(5, 10)).unwrap();
    assert_eq!(a.history, b.history);
    assert_ne!(a.history, c.history);
}
