//! Seeded random graphs with community-style labels, so the whole pipeline
//! can run without external datasets.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphModel {
    /// `G(n, p)`; the recipe parameter is the edge probability.
    ErdosRenyi,
    /// Preferential attachment; the recipe parameter is the number of edges
    /// each new node brings.
    BarabasiAlbert,
}

impl fmt::Display for GraphModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphModel::ErdosRenyi => "erdos-renyi",
            GraphModel::BarabasiAlbert => "barabasi-albert",
        })
    }
}

impl FromStr for GraphModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "erdos-renyi" => Ok(GraphModel::ErdosRenyi),
            "barabasi-albert" => Ok(GraphModel::BarabasiAlbert),
            other => Err(Error::InvalidArgument(format!("unknown graph model {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticRecipe {
    pub model: GraphModel,
    pub nodes: usize,
    pub parameter: f64,
    pub classes: usize,
    pub seed: u64,
}

impl SyntheticRecipe {
    pub fn build(&self) -> Result<Graph> {
        if self.classes < 2 {
            return Err(Error::TooFewClasses(self.classes));
        }
        if self.nodes < self.classes {
            return Err(Error::InvalidArgument(format!(
                "{} nodes cannot host {} classes",
                self.nodes, self.classes
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let edges = match self.model {
            GraphModel::ErdosRenyi => {
                if !(0.0..=1.0).contains(&self.parameter) {
                    return Err(Error::InvalidArgument(format!(
                        "edge probability {} outside [0, 1]",
                        self.parameter
                    )));
                }
                erdos_renyi_edges(self.nodes, self.parameter, &mut rng)
            }
            GraphModel::BarabasiAlbert => {
                let m = self.parameter as usize;
                if m < 1 || m as f64 != self.parameter || m >= self.nodes {
                    return Err(Error::InvalidArgument(format!(
                        "attachment count {} must be an integer in [1, {})",
                        self.parameter, self.nodes
                    )));
                }
                barabasi_albert_edges(self.nodes, m, &mut rng)
            }
        };
        let shape = Graph::unlabeled(self.nodes, edges)?;
        let labels = community_labels(&shape, self.classes, &mut rng);
        Graph::new(self.nodes, shape.edges(), labels, self.classes)
    }
}

pub fn erdos_renyi_edges<R: Rng>(n: usize, p: f64, rng: &mut R) -> Vec<(NodeId, NodeId)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// Starts from a star on `m + 1` nodes; every later node links to `m`
/// distinct earlier nodes chosen proportionally to degree.
pub fn barabasi_albert_edges<R: Rng>(n: usize, m: usize, rng: &mut R) -> Vec<(NodeId, NodeId)> {
    let mut edges: Vec<(NodeId, NodeId)> = (1..=m).map(|leaf| (0, leaf)).collect();
    // each node appears once per incident edge end
    let mut ends: Vec<NodeId> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    for new in m + 1..n {
        let mut chosen: Vec<NodeId> = Vec::with_capacity(m);
        while chosen.len() < m {
            let pick = ends[rng.gen_range(0..ends.len())];
            if !chosen.contains(&pick) {
                chosen.push(pick);
            }
        }
        for &old in &chosen {
            edges.push((old, new));
            ends.extend([old, new]);
        }
    }
    edges
}

/// Grows `classes` regions by simultaneous BFS from distinct random seeds,
/// so labels follow the community structure. Nodes the regions never reach
/// (other components) get a uniformly random class.
pub fn community_labels<R: Rng>(g: &Graph, classes: usize, rng: &mut R) -> Vec<usize> {
    let n = g.node_count();
    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(rng);
    let mut labels = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for (class, &seed) in order.iter().take(classes).enumerate() {
        labels[seed] = class;
        queue.push_back(seed);
    }
    while let Some(x) = queue.pop_front() {
        for &y in g.neighbors(x) {
            if labels[y] == usize::MAX {
                labels[y] = labels[x];
                queue.push_back(y);
            }
        }
    }
    for l in &mut labels {
        if *l == usize::MAX {
            *l = rng.gen_range(0..classes);
        }
    }
    labels
}
