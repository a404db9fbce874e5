//! Undirected, unweighted, labeled simple graphs.
//!
//! A [`Graph`] is immutable once built: self-loops and duplicate edges are
//! dropped at construction, neighbor lists are kept sorted, and every
//! perturbation goes through [`Graph::apply_flips`], which returns a new graph.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<NodeId>>,
    labels: Vec<usize>,
    class_count: usize,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph on `node_count` nodes. Self-loops and repeated edges
    /// (in either orientation) are silently dropped.
    pub fn new<I>(node_count: usize, edges: I, labels: Vec<usize>, class_count: usize) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        if class_count < 2 {
            return Err(Error::TooFewClasses(class_count));
        }
        if labels.len() != node_count {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} nodes",
                labels.len(),
                node_count
            )));
        }
        if let Some((node, &label)) = labels.iter().enumerate().find(|(_, &l)| l >= class_count) {
            return Err(Error::LabelOutOfRange {
                node,
                label,
                class_count,
            });
        }
        let mut adjacency = vec![Vec::new(); node_count];
        for (u, v) in edges {
            for node in [u, v] {
                if node >= node_count {
                    return Err(Error::NodeOutOfRange { node, node_count });
                }
            }
            if u != v {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
        let mut edge_count = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        Ok(Graph {
            adjacency,
            labels,
            class_count,
            edge_count: edge_count / 2,
        })
    }

    /// A graph whose nodes all carry class 0 of 2. Handy when labels do not
    /// matter (attribute extraction, tests).
    pub fn unlabeled<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        Graph::new(node_count, edges, vec![0; node_count], 2)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, node: NodeId) -> usize {
        self.labels[node]
    }

    pub fn check_node(&self, node: NodeId) -> Result<()> {
        if node < self.node_count() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                node,
                node_count: self.node_count(),
            })
        }
    }

    /// Sorted neighbor list. Panics if `node` is out of range.
    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: NodeId) -> Result<usize> {
        self.check_node(node)?;
        Ok(self.adjacency[node].len())
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.node_count() && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Common neighbors of `u` and `v`, sorted. For `u == v` this is the
    /// neighbor set of `u`.
    pub fn common_neighbors(&self, u: NodeId, v: NodeId) -> Result<Vec<NodeId>> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Ok(self.adjacency[u].clone());
        }
        let (a, b) = (&self.adjacency[u], &self.adjacency[v]);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(out)
    }

    /// Returns a new graph with `flips` applied in order. Each flip is checked
    /// against the state left by the flips before it.
    pub fn apply_flips(&self, flips: &[EdgeFlip]) -> Result<Graph> {
        let mut next = self.clone();
        for (index, flip) in flips.iter().enumerate() {
            next.apply_flip_in_place(flip).map_err(|_| Error::InvalidFlip {
                index,
                u: flip.u,
                v: flip.v,
                action: flip.action,
            })?;
        }
        Ok(next)
    }

    fn apply_flip_in_place(&mut self, flip: &EdgeFlip) -> Result<()> {
        let (u, v) = (flip.u, flip.v);
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        match (flip.action, self.adjacency[u].binary_search(&v)) {
            (FlipAction::Add, Err(pos)) => {
                self.adjacency[u].insert(pos, v);
                let pos = self.adjacency[v].binary_search(&u).unwrap_err();
                self.adjacency[v].insert(pos, u);
                self.edge_count += 1;
            }
            (FlipAction::Delete, Ok(pos)) => {
                self.adjacency[u].remove(pos);
                let pos = self.adjacency[v].binary_search(&u).unwrap();
                self.adjacency[v].remove(pos);
                self.edge_count -= 1;
            }
            _ => {
                return Err(Error::InvalidFlip {
                    index: 0,
                    u,
                    v,
                    action: flip.action,
                })
            }
        }
        Ok(())
    }

    /// BFS hop distances from `source`; `None` for unreachable nodes.
    pub fn bfs_distances(&self, source: NodeId) -> Vec<Option<usize>> {
        self.bfs_within(source, usize::MAX)
    }

    /// BFS distances from `source`, exploring no further than `radius` hops.
    pub fn bfs_within(&self, source: NodeId, radius: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].unwrap();
            if dx >= radius {
                continue;
            }
            for &y in &self.adjacency[x] {
                if dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Nodes within `radius` hops of `center` (center included), sorted.
    pub fn ball(&self, center: NodeId, radius: usize) -> Vec<NodeId> {
        let dist = self.bfs_within(center, radius);
        (0..self.node_count()).filter(|&v| dist[v].is_some()).collect()
    }

    /// Subgraph induced by `members` (sorted, deduplicated), relabeled to
    /// local ids `0..members.len()` in member order.
    pub fn induced(&self, members: &[NodeId]) -> Graph {
        let local = |x: NodeId| members.binary_search(&x).ok();
        let adjacency: Vec<Vec<NodeId>> = members
            .iter()
            .map(|&m| self.adjacency[m].iter().filter_map(|&x| local(x)).collect())
            .collect();
        let edge_count = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        Graph {
            adjacency,
            labels: members.iter().map(|&m| self.labels[m]).collect(),
            class_count: self.class_count,
            edge_count,
        }
    }

    /// The 2-hop ego-subgraph around `center`.
    pub fn ego_subgraph(&self, center: NodeId) -> Result<EgoSubgraph> {
        self.check_node(center)?;
        let members = self.ball(center, EGO_RADIUS);
        let graph = self.induced(&members);
        let local_center = members.binary_search(&center).unwrap();
        Ok(EgoSubgraph {
            center,
            local_center,
            members,
            graph,
        })
    }
}

/// Hop radius of ego-subgraphs; matches the receptive field of a two-layer
/// graph convolution.
pub const EGO_RADIUS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlipAction {
    Add,
    Delete,
}

impl FlipAction {
    pub fn inverse(self) -> Self {
        match self {
            FlipAction::Add => FlipAction::Delete,
            FlipAction::Delete => FlipAction::Add,
        }
    }
}

impl fmt::Display for FlipAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlipAction::Add => "add",
            FlipAction::Delete => "delete",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeFlip {
    pub u: NodeId,
    pub v: NodeId,
    pub action: FlipAction,
}

impl EdgeFlip {
    pub fn add(u: NodeId, v: NodeId) -> Self {
        EdgeFlip {
            u,
            v,
            action: FlipAction::Add,
        }
    }

    pub fn delete(u: NodeId, v: NodeId) -> Self {
        EdgeFlip {
            u,
            v,
            action: FlipAction::Delete,
        }
    }

    /// The flip that toggles the same pair in the current state of `g`.
    pub fn toggle(g: &Graph, u: NodeId, v: NodeId) -> Self {
        if g.has_edge(u, v) {
            EdgeFlip::delete(u, v)
        } else {
            EdgeFlip::add(u, v)
        }
    }

    pub fn inverse(&self) -> Self {
        EdgeFlip {
            action: self.action.inverse(),
            ..*self
        }
    }

    /// The unordered endpoint pair as `(min, max)`.
    pub fn pair(&self) -> (NodeId, NodeId) {
        (self.u.min(self.v), self.u.max(self.v))
    }
}

/// Induced subgraph on a center node and everything within two hops of it.
#[derive(Debug, Clone)]
pub struct EgoSubgraph {
    pub center: NodeId,
    /// Position of `center` inside `members`.
    pub local_center: usize,
    /// Parent-graph ids, sorted.
    pub members: Vec<NodeId>,
    /// Induced graph over `members`, using local ids.
    pub graph: Graph,
}

impl EgoSubgraph {
    pub fn node_count(&self) -> usize {
        self.members.len()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Induced edges in parent-graph ids.
    pub fn parent_edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.graph
            .edges()
            .map(|(a, b)| (self.members[a], self.members[b]))
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn drops_self_loops_and_duplicates() {
        let g = Graph::unlabeled(3, [(0, 0), (0, 1), (1, 0), (0, 1), (1, 2)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn rejects_bad_labels_and_ids() {
        assert!(matches!(
            Graph::new(2, [(0, 1)], vec![0, 3], 2),
            Err(Error::LabelOutOfRange { node: 1, label: 3, .. })
        ));
        assert!(matches!(
            Graph::unlabeled(2, [(0, 5)]),
            Err(Error::NodeOutOfRange { node: 5, .. })
        ));
        assert!(matches!(
            Graph::new(2, [], vec![0, 0], 1),
            Err(Error::TooFewClasses(1))
        ));
    }

    #[test]
    fn degrees() {
        assert_eq!(star(3).degree(0).unwrap(), 3);
        assert_eq!(Graph::unlabeled(2, []).unwrap().degree(1).unwrap(), 0);
        assert_eq!(triangle().degree(2).unwrap(), 2);
        assert!(triangle().degree(3).is_err());
    }

    #[test]
    fn common_neighbor_sets() {
        assert_eq!(triangle().common_neighbors(0, 1).unwrap(), vec![2]);
        assert_eq!(path(3).common_neighbors(0, 2).unwrap(), vec![1]);
        assert_eq!(star(3).common_neighbors(0, 0).unwrap(), vec![1, 2, 3]);
        assert!(path(3).common_neighbors(0, 7).is_err());
    }

    #[test]
    fn flips() {
        let p = path(3);
        assert_eq!(p.apply_flips(&[]).unwrap(), p);

        let tri = p.apply_flips(&[EdgeFlip::add(0, 2)]).unwrap();
        assert_eq!(tri, Graph::unlabeled(3, [(0, 1), (1, 2), (2, 0)]).unwrap());
        assert_eq!(p.edge_count(), 2, "input untouched");

        let back = p
            .apply_flips(&[EdgeFlip::delete(0, 1), EdgeFlip::add(1, 0)])
            .unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn invalid_flip_reports_index() {
        let p = path(3);
        let err = p
            .apply_flips(&[EdgeFlip::add(0, 2), EdgeFlip::add(2, 0)])
            .unwrap_err();
        assert!(matches!(err, Error::InvalidFlip { index: 1, .. }));
        let err = p.apply_flips(&[EdgeFlip::delete(0, 2)]).unwrap_err();
        assert!(matches!(err, Error::InvalidFlip { index: 0, .. }));
        assert!(p.apply_flips(&[EdgeFlip::add(1, 1)]).is_err());
    }

    #[test]
    fn ego_subgraphs() {
        let iso = Graph::unlabeled(3, [(1, 2)]).unwrap().ego_subgraph(0).unwrap();
        assert_eq!(iso.members, vec![0]);
        assert_eq!(iso.edge_count(), 0);

        let ego = path(5).ego_subgraph(0).unwrap();
        assert_eq!(ego.members, vec![0, 1, 2]);
        assert_eq!(ego.parent_edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);

        let leaf = star(3).ego_subgraph(2).unwrap();
        assert_eq!(leaf.members, vec![0, 1, 2, 3]);
        assert_eq!(leaf.edge_count(), 3);
        assert_eq!(leaf.local_center, 2);
        assert!(star(3).ego_subgraph(4).is_err());
    }
}
