use super::history::{Doubling, GrowthHistory, Model, Step};
use super::network::SpNetwork;
use crate::error::{Error, Result};

/// Blue marks a parallel doubling, red a serial one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Colour {
    Blue,
    Red,
}

impl From<Doubling> for Colour {
    fn from(d: Doubling) -> Colour {
        match d {
            Doubling::Parallel => Colour::Blue,
            Doubling::Serial => Colour::Red,
        }
    }
}

impl From<Colour> for Doubling {
    fn from(c: Colour) -> Doubling {
        match c {
            Colour::Blue => Doubling::Parallel,
            Colour::Red => Doubling::Serial,
        }
    }
}

/// Increasing tree on labels `1..=n` with coloured edges; node `k` hangs
/// below the edge it duplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColouredRecursiveTree {
    // Entry k - 2 describes node k.
    parent: Vec<u32>,
    colour: Vec<Colour>,
}

impl ColouredRecursiveTree {
    pub fn single() -> ColouredRecursiveTree {
        ColouredRecursiveTree { parent: Vec::new(), colour: Vec::new() }
    }

    /// Tree from `(parent, colour)` of nodes `2, 3, …` in order.
    pub fn from_parents(edges: &[(u32, Colour)]) -> Result<ColouredRecursiveTree> {
        for (i, &(parent, _)) in edges.iter().enumerate() {
            let child = i as u32 + 2;
            if parent == 0 || parent >= child {
                return Err(Error::MalformedTree(format!("node {child} has parent {parent}")));
            }
        }
        Ok(ColouredRecursiveTree {
            parent: edges.iter().map(|e| e.0).collect(),
            colour: edges.iter().map(|e| e.1).collect(),
        })
    }

    pub fn from_history(history: &GrowthHistory) -> ColouredRecursiveTree {
        ColouredRecursiveTree {
            parent: history.steps().iter().map(|s| s.edge).collect(),
            colour: history.steps().iter().map(|s| s.doubling.into()).collect(),
        }
    }

    pub(crate) fn push(&mut self, parent: u32, colour: Colour) {
        self.parent.push(parent);
        self.colour.push(colour);
    }

    pub fn order(&self) -> usize {
        self.parent.len() + 1
    }

    /// Parent and edge colour of `node`; `None` for the root.
    pub fn parent(&self, node: u32) -> Option<(u32, Colour)> {
        let i = (node as usize).checked_sub(2)?;
        Some((*self.parent.get(i)?, self.colour[i]))
    }

    /// Read the history back off the tree.
    pub fn to_history(&self, p: f64) -> Result<GrowthHistory> {
        let steps = self.parent.iter().zip(&self.colour).map(|(&j, &c)| Step { edge: j, doubling: c.into() });
        GrowthHistory::new(Model::bernoulli(p)?, steps.collect())
    }

    pub fn to_network(&self) -> SpNetwork {
        let mut net = SpNetwork::single_edge(false);
        for (&j, &c) in self.parent.iter().zip(&self.colour) {
            net.push_step(Step { edge: j, doubling: c.into() });
        }
        net
    }

    /// Order of the maximal root subtree whose edges all have `colour`.
    pub fn monochrome_subtree_order(&self, colour: Colour) -> usize {
        // Parents precede children, so one forward pass suffices.
        let mut inside = vec![true];
        for (&j, &c) in self.parent.iter().zip(&self.colour) {
            inside.push(c == colour && inside[j as usize - 1]);
        }
        inside.iter().filter(|&&b| b).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colour_counts() {
        let t = ColouredRecursiveTree::from_parents(&[(1, Colour::Blue), (1, Colour::Red)]).unwrap();
        assert_eq!(t.monochrome_subtree_order(Colour::Blue), 2);
        assert_eq!(t.monochrome_subtree_order(Colour::Red), 2);
        let single = ColouredRecursiveTree::single();
        assert_eq!(single.monochrome_subtree_order(Colour::Blue), 1);
        assert_eq!(single.order(), 1);
    }

    #[test]
    fn parents_must_be_smaller() {
        assert!(ColouredRecursiveTree::from_parents(&[(2, Colour::Blue)]).is_err());
        assert!(ColouredRecursiveTree::from_parents(&[(0, Colour::Blue)]).is_err());
    }

    #[test]
    fn network_matches_replay() {
        let t = ColouredRecursiveTree::from_parents(&[(1, Colour::Red), (1, Colour::Blue)]).unwrap();
        let h = GrowthHistory::new(Model::bernoulli(0.3).unwrap(), vec![Step::serial(1), Step::parallel(1)]).unwrap();
        assert_eq!(t.to_network(), SpNetwork::replay(&h).unwrap());
        assert_eq!(t.to_history(0.3).unwrap(), h);
        assert_eq!(ColouredRecursiveTree::from_history(&h), t);
    }
}
