use super::history::GrowthHistory;
use super::network::{Edge, SpNetwork};
use super::NodeId;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// A node of a bucket tree holding one or two labels.
///
/// Forests are stored earliest tree first. In the network the earliest tree
/// of a forest is the block next to the sink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bucket {
    labels: [u32; 2],
    parent: Option<(usize, Side)>,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Bucket {
    fn new(label: u32, parent: Option<(usize, Side)>) -> Bucket {
        Bucket { labels: [label, 0], parent, left: Vec::new(), right: Vec::new() }
    }

    pub fn labels(&self) -> &[u32] {
        if self.labels[1] == 0 {
            &self.labels[..1]
        } else {
            &self.labels
        }
    }

    pub fn is_saturated(&self) -> bool {
        self.labels[1] != 0
    }

    pub fn parent(&self) -> Option<(usize, Side)> {
        self.parent
    }

    pub fn forest(&self, side: Side) -> &[usize] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }
}

/// Nested description of a bucket tree, forests listed earliest tree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BucketSpec {
    pub labels: Vec<u32>,
    pub left: Vec<BucketSpec>,
    pub right: Vec<BucketSpec>,
}

impl BucketSpec {
    pub fn leaf(label: u32) -> BucketSpec {
        BucketSpec { labels: vec![label], left: Vec::new(), right: Vec::new() }
    }

    pub fn pair(a: u32, b: u32, left: Vec<BucketSpec>, right: Vec<BucketSpec>) -> BucketSpec {
        BucketSpec { labels: vec![a, b], left, right }
    }
}

/// Bucket-recursive tree with bucket size at most two.
///
/// Buckets are indexed in creation order, so every child has a larger index
/// than its parent and bottom-up passes can run over indices in reverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BucketRecursiveTree {
    buckets: Vec<Bucket>,
    home: Vec<usize>,
}

impl BucketRecursiveTree {
    pub fn single() -> BucketRecursiveTree {
        BucketRecursiveTree { buckets: vec![Bucket::new(1, None)], home: vec![0] }
    }

    /// Adds the next label, attracted by label `j`.
    pub(crate) fn attach(&mut self, j: u32) {
        let n = self.home.len() as u32 + 1;
        let b = self.home[j as usize - 1];
        if self.buckets[b].is_saturated() {
            let side = if self.buckets[b].labels[0] == j { Side::Left } else { Side::Right };
            let child = self.buckets.len();
            self.buckets.push(Bucket::new(n, Some((b, side))));
            match side {
                Side::Left => self.buckets[b].left.push(child),
                Side::Right => self.buckets[b].right.push(child),
            }
            self.home.push(child);
        } else {
            self.buckets[b].labels[1] = n;
            self.home.push(b);
        }
    }

    /// Whether the bucket holding `label` is full. Mirrors the saturation
    /// of the tail of edge `label` in the network.
    pub fn label_saturated(&self, label: u32) -> bool {
        self.buckets[self.home[label as usize - 1]].is_saturated()
    }

    pub fn from_history(history: &GrowthHistory) -> BucketRecursiveTree {
        let mut tree = BucketRecursiveTree::single();
        for step in history.steps() {
            tree.attach(step.edge);
        }
        tree
    }

    /// Builds and validates a tree from its nested description.
    pub fn from_spec(spec: &BucketSpec) -> Result<BucketRecursiveTree> {
        let mut buckets: Vec<Bucket> = Vec::new();
        let mut stack = vec![(spec, None::<(usize, Side)>)];
        while let Some((node, parent)) = stack.pop() {
            let idx = buckets.len();
            let labels = match node.labels.as_slice() {
                [a] if node.left.is_empty() && node.right.is_empty() => [*a, 0],
                [_] => return Err(Error::MalformedTree("a one-label bucket has children".into())),
                [a, b] if a < b => [*a, *b],
                other => return Err(Error::MalformedTree(format!("bad bucket labels {other:?}"))),
            };
            if labels[0] == 0 {
                return Err(Error::MalformedTree("label 0".into()));
            }
            buckets.push(Bucket { labels, parent, left: Vec::new(), right: Vec::new() });
            if let Some((p, side)) = parent {
                match side {
                    Side::Left => buckets[p].left.push(idx),
                    Side::Right => buckets[p].right.push(idx),
                }
            }
            // Reverse so that the earliest tree is popped, and stored, first.
            for child in node.right.iter().rev() {
                stack.push((child, Some((idx, Side::Right))));
            }
            for child in node.left.iter().rev() {
                stack.push((child, Some((idx, Side::Left))));
            }
        }
        let n: usize = buckets.iter().map(|b| b.labels().len()).sum();
        let mut home = vec![usize::MAX; n];
        for (i, b) in buckets.iter().enumerate() {
            for &l in b.labels() {
                if l as usize > n || home[l as usize - 1] != usize::MAX {
                    return Err(Error::MalformedTree(format!("label {l} is out of range or repeated")));
                }
                home[l as usize - 1] = i;
            }
        }
        let loose = BucketRecursiveTree { buckets, home };
        let history = loose.to_history()?;
        let tree = BucketRecursiveTree::from_history(&history);
        if tree.to_spec() != *spec {
            return Err(Error::MalformedTree("labels do not respect insertion order".into()));
        }
        Ok(tree)
    }

    /// Nested description; inverse of [`from_spec`](Self::from_spec).
    pub fn to_spec(&self) -> BucketSpec {
        let mut specs: Vec<Option<BucketSpec>> = vec![None; self.buckets.len()];
        for i in (0..self.buckets.len()).rev() {
            let b = &self.buckets[i];
            let mut take = |ids: &[usize]| ids.iter().map(|&c| specs[c].take().unwrap()).collect::<Vec<_>>();
            let left = take(&b.left);
            let right = take(&b.right);
            specs[i] = Some(BucketSpec { labels: b.labels().to_vec(), left, right });
        }
        specs[0].take().unwrap()
    }

    /// Number of labels.
    pub fn order(&self) -> usize {
        self.home.len()
    }

    pub fn root(&self) -> &Bucket {
        &self.buckets[0]
    }

    pub fn buckets(&self) -> &[Bucket] {
        &self.buckets
    }

    /// Label that attracted `label`, or `None` for label 1.
    pub fn attractor(&self, label: u32) -> Option<u32> {
        let b = &self.buckets[*self.home.get((label as usize).checked_sub(1)?)?];
        if b.labels[1] == label {
            return Some(b.labels[0]);
        }
        let (p, side) = b.parent?;
        Some(self.buckets[p].labels[side as usize])
    }

    /// Binary history that grows this tree.
    pub fn to_history(&self) -> Result<GrowthHistory> {
        let mut choices = Vec::with_capacity(self.order().saturating_sub(1));
        for label in 2..=self.order() as u32 {
            match self.attractor(label) {
                Some(j) if j != 0 && j < label => choices.push(j),
                _ => return Err(Error::MalformedTree(format!("label {label} has no earlier attractor"))),
            }
        }
        GrowthHistory::binary_from_choices(&choices)
    }

    /// Structural construction: each saturated bucket `(a, b)` spans two
    /// halves, edge `a` followed in series by the blocks of its left forest
    /// from latest to earliest, and likewise edge `b` with the right forest.
    pub fn to_network(&self) -> SpNetwork {
        let n = self.order();
        let mut ends = vec![(0usize, 0usize); self.buckets.len()];
        ends[0] = (0, 1);
        let mut slots = 2;
        let mut edges = vec![Edge { label: 0, from: NodeId::SOURCE, to: NodeId::SINK }; n];
        for (i, bucket) in self.buckets.iter().enumerate() {
            let (s, t) = ends[i];
            for (k, &label) in bucket.labels().iter().enumerate() {
                let forest = if k == 0 { &bucket.left } else { &bucket.right };
                // Junction u_m sits before the m-th tree; u_0 is the sink end.
                let mut next = t;
                for &child in forest {
                    let u = slots;
                    slots += 1;
                    ends[child] = (u, next);
                    next = u;
                }
                edges[label as usize - 1] = Edge { label, from: NodeId::from_slot(s), to: NodeId::from_slot(next) };
            }
        }
        let mut edges_in_order = Vec::with_capacity(n);
        let mut by_tail: Vec<Vec<Edge>> = vec![Vec::new(); slots];
        // Each node is the source of exactly one bucket, whose labels give
        // its out-edges in order.
        for bucket in &self.buckets {
            for &label in bucket.labels() {
                let e = edges[label as usize - 1];
                by_tail[e.from.slot().unwrap()].push(e);
            }
        }
        for list in by_tail {
            edges_in_order.extend(list);
        }
        let mut net = SpNetwork::from_edges(true, edges_in_order).expect("slots are valid");
        net.canonicalize();
        net
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn attach_fills_then_branches() {
        let h = GrowthHistory::binary_from_choices(&[1, 1, 2]).unwrap();
        let t = BucketRecursiveTree::from_history(&h);
        assert_eq!(t.root().labels(), &[1, 2]);
        assert_eq!(t.to_spec(), BucketSpec::pair(1, 2, vec![BucketSpec::leaf(3)], vec![BucketSpec::leaf(4)]));
        assert_eq!(t.to_history().unwrap(), h);
    }

    #[test]
    fn spec_round_trip_and_rejections() {
        let spec = BucketSpec::pair(
            1,
            2,
            vec![BucketSpec::pair(3, 5, vec![], vec![BucketSpec::leaf(7)]), BucketSpec::leaf(6)],
            vec![BucketSpec::leaf(4)],
        );
        let t = BucketRecursiveTree::from_spec(&spec).unwrap();
        assert_eq!(t.to_spec(), spec);
        assert_eq!(t.order(), 7);

        let leaf_with_child = BucketSpec { labels: vec![1], left: vec![BucketSpec::leaf(2)], right: vec![] };
        assert!(BucketRecursiveTree::from_spec(&leaf_with_child).is_err());
        // Child label smaller than the parent's second label.
        let early_child = BucketSpec::pair(1, 3, vec![BucketSpec::leaf(2)], vec![]);
        assert!(BucketRecursiveTree::from_spec(&early_child).is_err());
        // Forest listed out of creation order.
        let swapped = BucketSpec::pair(1, 2, vec![BucketSpec::leaf(4), BucketSpec::leaf(3)], vec![]);
        assert!(BucketRecursiveTree::from_spec(&swapped).is_err());
        let missing = BucketSpec::pair(1, 3, vec![], vec![]);
        assert!(BucketRecursiveTree::from_spec(&missing).is_err());
    }

    #[test]
    fn structural_network_small_cases() {
        assert_eq!(BucketRecursiveTree::single().to_network(), SpNetwork::single_edge(true));
        let pair = BucketRecursiveTree::from_spec(&BucketSpec::pair(1, 2, vec![], vec![])).unwrap();
        let net = pair.to_network();
        assert_eq!(net.out_edges(NodeId::SOURCE), &[1, 2]);
        assert_eq!(net.in_degree(NodeId::SINK), 2);

        let left = BucketRecursiveTree::from_spec(&BucketSpec::pair(1, 2, vec![BucketSpec::leaf(3)], vec![])).unwrap();
        let net = left.to_network();
        assert_eq!(net.node_count(), 3);
        assert_eq!(net.edge(1).unwrap().to, NodeId(1));
        assert_eq!(net.edge(3).unwrap().from, NodeId(1));
        assert_eq!(net.edge(2).unwrap().to, NodeId::SINK);
        assert_eq!(net, SpNetwork::replay(&left.to_history().unwrap()).unwrap());
    }

    #[test]
    fn caption_tree_matches_replay() {
        let h = GrowthHistory::binary_from_choices(&[1, 1, 2, 2, 5, 5]).unwrap();
        let t = BucketRecursiveTree::from_history(&h);
        assert_eq!(t.to_network(), SpNetwork::replay(&h).unwrap());
    }
}
