use std::collections::VecDeque;
use std::fmt::{self, Write as _};

use super::history::{Doubling, GrowthHistory, Model, Step};
use super::NodeId;
use crate::error::{Error, Result};

/// Directed edge `from -> to` carrying its label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub label: u32,
    pub from: NodeId,
    pub to: NodeId,
}

/// Two-terminal DAG with labelled edges and ordered out-adjacency.
///
/// Networks produced by [`SpNetwork::replay`] store edge `i` at index
/// `i - 1`. The out-edge order of every node is part of the value: two
/// networks are equal only if their labelled edges and all out-edge orders
/// agree.
#[derive(Debug, Clone)]
pub struct SpNetwork {
    binary: bool,
    edges: Vec<Edge>,
    out: Vec<Vec<u32>>,
}

impl PartialEq for SpNetwork {
    fn eq(&self, other: &SpNetwork) -> bool {
        self.edges == other.edges && self.out == other.out
    }
}

impl Eq for SpNetwork {}

impl SpNetwork {
    /// The size-1 network: one edge labelled 1 from source to sink.
    pub fn single_edge(binary: bool) -> SpNetwork {
        SpNetwork {
            binary,
            edges: vec![Edge { label: 1, from: NodeId::SOURCE, to: NodeId::SINK }],
            out: vec![vec![1], Vec::new()],
        }
    }

    /// Arbitrary network for validation; out-edge order follows list order.
    /// Nothing is checked here beyond node ids being representable.
    pub fn from_edges(binary: bool, mut edges: Vec<Edge>) -> Result<SpNetwork> {
        let mut slots = 2;
        for e in &edges {
            for node in [e.from, e.to] {
                slots = slots.max(node.slot().ok_or(Error::InvalidNode(node))? + 1);
            }
        }
        let mut out = vec![Vec::new(); slots];
        for e in &edges {
            out[e.from.slot().unwrap()].push(e.label);
        }
        edges.sort_by_key(|e| e.label);
        Ok(SpNetwork { binary, edges, out })
    }

    /// Deterministic replay of a growth history.
    pub fn replay(history: &GrowthHistory) -> Result<SpNetwork> {
        let binary = history.model() == Model::Binary;
        let mut net = SpNetwork::single_edge(binary);
        net.edges.reserve(history.steps().len());
        for (t, &step) in history.steps().iter().enumerate() {
            if binary {
                let forced = net.forced_doubling(step.edge);
                if forced != step.doubling {
                    return Err(Error::InconsistentDoubling {
                        step: t,
                        recorded: step.doubling.name(),
                        forced: forced.name(),
                    });
                }
            }
            net.push_step(step);
        }
        Ok(net)
    }

    pub fn is_binary(&self) -> bool {
        self.binary
    }

    /// Doubling type the saturation rule forces for `edge`.
    pub fn forced_doubling(&self, edge: u32) -> Doubling {
        let tail = self.edges[edge as usize - 1].from;
        if self.out[tail.slot().unwrap()].len() == 1 {
            Doubling::Parallel
        } else {
            Doubling::Serial
        }
    }

    /// Applies one step without checking the saturation rule.
    pub(crate) fn push_step(&mut self, step: Step) {
        let n = self.edges.len() as u32 + 1;
        let e = self.edges[step.edge as usize - 1];
        match step.doubling {
            Doubling::Parallel => {
                let list = &mut self.out[e.from.slot().unwrap()];
                let at = list.iter().position(|&l| l == step.edge).unwrap();
                list.insert(at + 1, n);
                self.edges.push(Edge { label: n, from: e.from, to: e.to });
            }
            Doubling::Serial => {
                let z = NodeId::from_slot(self.out.len());
                self.out.push(vec![n]);
                self.edges[step.edge as usize - 1].to = z;
                self.edges.push(Edge { label: n, from: z, to: e.to });
            }
        }
    }

    /// Undoes the most recent [`push_step`](Self::push_step), which must have been `step`.
    pub(crate) fn pop_step(&mut self, step: Step) {
        let last = self.edges.pop().expect("pop_step on the base network");
        match step.doubling {
            Doubling::Parallel => {
                let list = &mut self.out[last.from.slot().unwrap()];
                let at = list.iter().rposition(|&l| l == last.label).unwrap();
                list.remove(at);
            }
            Doubling::Serial => {
                self.out.pop();
                self.edges[step.edge as usize - 1].to = last.to;
            }
        }
    }

    /// Number of edges.
    pub fn size(&self) -> usize {
        self.edges.len()
    }

    /// Number of nodes, poles included.
    pub fn node_count(&self) -> usize {
        self.out.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edge by label, for networks with contiguous labels.
    pub fn edge(&self, label: u32) -> Option<&Edge> {
        self.edges.get((label as usize).checked_sub(1)?).filter(|e| e.label == label)
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.out.len()).map(NodeId::from_slot)
    }

    /// Ordered out-edge labels of `node`.
    pub fn out_edges(&self, node: NodeId) -> &[u32] {
        node.slot().and_then(|s| self.out.get(s)).map_or(&[], Vec::as_slice)
    }

    pub fn out_degree(&self, node: NodeId) -> usize {
        self.out_edges(node).len()
    }

    pub fn in_degree(&self, node: NodeId) -> usize {
        self.edges.iter().filter(|e| e.to == node).count()
    }

    pub(crate) fn out_by_slot(&self) -> &[Vec<u32>] {
        &self.out
    }

    /// Kahn order of node slots, or `None` if there is a cycle.
    pub(crate) fn topological_slots(&self) -> Option<Vec<usize>> {
        let mut indegree = vec![0usize; self.out.len()];
        for e in &self.edges {
            indegree[e.to.slot()?] += 1;
        }
        let mut queue: VecDeque<usize> = (0..self.out.len()).filter(|&s| indegree[s] == 0).collect();
        let mut order = Vec::with_capacity(self.out.len());
        while let Some(s) = queue.pop_front() {
            order.push(s);
            for &label in &self.out[s] {
                let t = self.edge(label)?.to.slot()?;
                indegree[t] -= 1;
                if indegree[t] == 0 {
                    queue.push_back(t);
                }
            }
        }
        (order.len() == self.out.len()).then_some(order)
    }

    /// Checks every structural invariant; an empty report means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut report = Vec::new();
        let mut seen = vec![false; self.edges.len()];
        for e in &self.edges {
            let idx = e.label as usize;
            if idx == 0 || idx > self.edges.len() {
                report.push(Violation::new(Invariant::LabelRange, Witness::Edge(e.label)));
            } else if seen[idx - 1] {
                report.push(Violation::new(Invariant::UniqueLabels, Witness::Edge(e.label)));
            } else {
                seen[idx - 1] = true;
            }
        }
        if self.edges.is_empty() {
            report.push(Violation::new(Invariant::LabelRange, Witness::Network));
        }
        if !report.is_empty() {
            // Label lookups below assume labels 1..=n.
            return report;
        }

        for (slot, list) in self.out.iter().enumerate() {
            let node = NodeId::from_slot(slot);
            for &label in list {
                if self.edges[label as usize - 1].from != node {
                    report.push(Violation::new(Invariant::Adjacency, Witness::Edge(label)));
                }
            }
        }
        let listed: usize = self.out.iter().map(Vec::len).sum();
        if listed != self.edges.len() {
            report.push(Violation::new(Invariant::Adjacency, Witness::Network));
        }
        for e in &self.edges {
            if e.to == NodeId::SOURCE {
                report.push(Violation::new(Invariant::SourceInDegree, Witness::Edge(e.label)));
            }
            if e.from == NodeId::SINK {
                report.push(Violation::new(Invariant::SinkOutDegree, Witness::Edge(e.label)));
            }
        }

        if self.topological_slots().is_none() {
            report.push(Violation::new(Invariant::Acyclic, Witness::Network));
        }
        let forward = self.reachable(0, false);
        let backward = self.reachable(1, true);
        for slot in 0..self.out.len() {
            if !(forward[slot] && backward[slot]) {
                report.push(Violation::new(Invariant::OnSourceSinkPath, Witness::Node(NodeId::from_slot(slot))));
            }
        }

        if self.binary {
            for (slot, list) in self.out.iter().enumerate() {
                if list.len() > 2 {
                    report.push(Violation::new(Invariant::BinaryOutDegree, Witness::Node(NodeId::from_slot(slot))));
                }
            }
            if self.edges.len() >= 2 && self.out[0].len() != 2 {
                report.push(Violation::new(Invariant::BinarySourceDegree, Witness::Node(NodeId::SOURCE)));
            }
        }
        report
    }

    fn reachable(&self, start: usize, reverse: bool) -> Vec<bool> {
        let mut adjacency = vec![Vec::new(); self.out.len()];
        for e in &self.edges {
            let (a, b) = (e.from.slot().unwrap(), e.to.slot().unwrap());
            if reverse {
                adjacency[b].push(a);
            } else {
                adjacency[a].push(b);
            }
        }
        let mut seen = vec![false; self.out.len()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(s) = stack.pop() {
            for &t in &adjacency[s] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// Renumbers internal nodes by their smallest out-edge label.
    ///
    /// Replay creates node `z` together with its first out-edge, and labels
    /// at a node only grow afterwards, so replayed networks are already in
    /// this form. Structural constructions use it to become comparable.
    pub(crate) fn canonicalize(&mut self) {
        let internal = self.out.len() - 2;
        let mut order: Vec<usize> = (2..self.out.len()).collect();
        order.sort_by_key(|&s| self.out[s].iter().copied().min().unwrap_or(u32::MAX));
        let mut new_slot = vec![0usize; self.out.len()];
        new_slot[1] = 1;
        for (rank, &s) in order.iter().enumerate() {
            new_slot[s] = rank + 2;
        }
        let relabel = |id: NodeId| NodeId::from_slot(new_slot[id.slot().unwrap()]);
        for e in &mut self.edges {
            e.from = relabel(e.from);
            e.to = relabel(e.to);
        }
        let mut out = vec![Vec::new(); internal + 2];
        for (s, list) in std::mem::take(&mut self.out).into_iter().enumerate() {
            out[new_slot[s]] = list;
        }
        self.out = out;
    }

    /// GraphViz export. Each edge carries `label` and its position `ord` in
    /// the out-edge list of its tail.
    pub fn to_dot(&self) -> String {
        let mut dot = String::from("digraph sp {\n  rankdir=TB;\n");
        for (slot, list) in self.out.iter().enumerate() {
            let from = NodeId::from_slot(slot);
            for (ord, &label) in list.iter().enumerate() {
                let to = self.edges[label as usize - 1].to;
                let _ = writeln!(dot, "  \"{from}\" -> \"{to}\" [label={label}, ord={ord}];");
            }
        }
        dot.push_str("}\n");
        dot
    }
}

/// Which invariant a [`Violation`] breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invariant {
    LabelRange,
    UniqueLabels,
    Adjacency,
    SourceInDegree,
    SinkOutDegree,
    Acyclic,
    OnSourceSinkPath,
    BinaryOutDegree,
    BinarySourceDegree,
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Invariant::LabelRange => "labels are 1..=n",
            Invariant::UniqueLabels => "labels are unique",
            Invariant::Adjacency => "out-adjacency lists every edge at its tail once",
            Invariant::SourceInDegree => "source in-degree 0",
            Invariant::SinkOutDegree => "sink out-degree 0",
            Invariant::Acyclic => "acyclic",
            Invariant::OnSourceSinkPath => "every node lies on a source-to-sink path",
            Invariant::BinaryOutDegree => "binary out-degree ≤ 2",
            Invariant::BinarySourceDegree => "binary source out-degree 2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Witness {
    Node(NodeId),
    Edge(u32),
    Network,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub invariant: Invariant,
    pub witness: Witness,
}

impl Violation {
    fn new(invariant: Invariant, witness: Witness) -> Violation {
        Violation { invariant, witness }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.witness {
            Witness::Node(v) => write!(f, "{} (node {v})", self.invariant),
            Witness::Edge(l) => write!(f, "{} (edge {l})", self.invariant),
            Witness::Network => write!(f, "{}", self.invariant),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bern(steps: Vec<Step>) -> GrowthHistory {
        GrowthHistory::new(Model::bernoulli(0.5).unwrap(), steps).unwrap()
    }

    fn e(label: u32, from: i64, to: i64) -> Edge {
        Edge { label, from: NodeId(from), to: NodeId(to) }
    }

    #[test]
    fn base_network_is_valid() {
        let net = SpNetwork::replay(&bern(vec![])).unwrap();
        assert_eq!(net.size(), 1);
        assert_eq!(net.node_count(), 2);
        assert!(net.validate().is_empty());
    }

    #[test]
    fn parallel_then_serial() {
        let net = SpNetwork::replay(&bern(vec![Step::parallel(1), Step::serial(1)])).unwrap();
        assert_eq!(net.node_count(), 3);
        assert_eq!(net.out_edges(NodeId::SOURCE), &[1, 2]);
        assert_eq!(net.edges()[0], e(1, 0, 1));
        assert_eq!(net.edges()[1], e(2, 0, -1));
        assert_eq!(net.edges()[2], e(3, 1, -1));
        assert!(net.validate().is_empty());
    }

    #[test]
    fn parallel_insertion_goes_right_of_the_duplicate() {
        let net = SpNetwork::replay(&bern(vec![Step::parallel(1), Step::parallel(1), Step::parallel(2)])).unwrap();
        assert_eq!(net.out_edges(NodeId::SOURCE), &[1, 3, 2, 4]);
    }

    #[test]
    fn binary_flag_is_checked() {
        let good = GrowthHistory::binary_from_choices(&[1]).unwrap();
        let net = SpNetwork::replay(&good).unwrap();
        assert_eq!(net.out_edges(NodeId::SOURCE), &[1, 2]);
        let bad = GrowthHistory::new(Model::Binary, vec![Step::serial(1)]).unwrap();
        match SpNetwork::replay(&bad) {
            Err(Error::InconsistentDoubling { step: 0, recorded: "serial", forced: "parallel" }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn push_pop_round_trip() {
        let mut net = SpNetwork::replay(&bern(vec![Step::parallel(1), Step::serial(2)])).unwrap();
        let before = net.clone();
        for step in [Step::serial(3), Step::parallel(1), Step::serial(2)] {
            net.push_step(step);
            assert!(net.validate().is_empty());
            net.pop_step(step);
            assert_eq!(net, before);
            assert_eq!(net.node_count(), before.node_count());
        }
    }

    #[test]
    fn violations_name_their_witness() {
        let into_source = SpNetwork::from_edges(false, vec![e(1, 0, -1), e(2, 1, 0), e(3, 0, 1)]).unwrap();
        let report = into_source.validate();
        assert!(report.contains(&Violation::new(Invariant::SourceInDegree, Witness::Edge(2))));
        assert!(report.iter().any(|v| v.to_string().starts_with("source in-degree 0")));

        let wide =
            SpNetwork::from_edges(true, vec![e(1, 0, 1), e(2, 1, -1), e(3, 1, -1), e(4, 1, -1), e(5, 0, -1)]).unwrap();
        let report = wide.validate();
        assert_eq!(report, vec![Violation::new(Invariant::BinaryOutDegree, Witness::Node(NodeId(1)))]);
        assert_eq!(report[0].to_string(), "binary out-degree ≤ 2 (node 1)");

        let dup = SpNetwork::from_edges(false, vec![e(1, 0, -1), e(1, 0, -1)]).unwrap();
        assert!(dup.validate().iter().any(|v| v.invariant == Invariant::UniqueLabels));

        let dangling = SpNetwork::from_edges(false, vec![e(1, 0, -1), e(2, 0, 1)]).unwrap();
        assert!(dangling.validate().contains(&Violation::new(Invariant::OnSourceSinkPath, Witness::Node(NodeId(1)))));

        let cycle = SpNetwork::from_edges(false, vec![e(1, 0, 1), e(2, 1, 2), e(3, 2, 1), e(4, 2, -1)]).unwrap();
        assert!(cycle.validate().iter().any(|v| v.invariant == Invariant::Acyclic));
    }

    #[test]
    fn canonicalize_is_identity_on_replays() {
        let h = bern(vec![Step::serial(1), Step::serial(2), Step::serial(1), Step::parallel(3)]);
        let net = SpNetwork::replay(&h).unwrap();
        let mut c = net.clone();
        c.canonicalize();
        assert_eq!(c, net);
    }

    #[test]
    fn dot_lists_edges_with_order() {
        let net = SpNetwork::replay(&bern(vec![Step::parallel(1)])).unwrap();
        let dot = net.to_dot();
        assert!(dot.contains("\"source\" -> \"sink\" [label=1, ord=0];"));
        assert!(dot.contains("\"source\" -> \"sink\" [label=2, ord=1];"));
    }
}
