//! The 17-dimensional structural attribute vector of a target node.
//!
//! Six node-level values are measured on the whole graph at the target; the
//! remaining eleven describe the target's 2-hop ego-subgraph, with every
//! per-node average computed inside the induced subgraph.

pub mod centrality;

use serde::{Deserialize, Serialize};

pub use centrality::{
    avg_neighbor_degree, betweenness_all, betweenness_centrality, closeness_centrality,
    clustering_coefficient, dominant_eigenpair, eigenvector_centrality, largest_eigenvalue,
};

use crate::error::Result;
use crate::graph::{EgoSubgraph, Graph, NodeId};

pub const ATTRIBUTE_COUNT: usize = 17;
pub const NODE_LEVEL_COUNT: usize = 6;

/// Frozen column order. Trained models and emitted CSVs depend on it.
pub const ATTRIBUTE_NAMES: [&str; ATTRIBUTE_COUNT] = [
    "D_i", "C_i", "BC_i", "CC_i", "EC_i", "ND_i", "N_sg", "E_sg", "D_sg", "P_sg", "EV", "DS",
    "C_sg", "BC_sg", "CC_sg", "EC_sg", "ND_sg",
];

pub fn attribute_index(name: &str) -> Option<usize> {
    ATTRIBUTE_NAMES.iter().position(|&n| n == name)
}

pub fn is_subgraph_level(index: usize) -> bool {
    index >= NODE_LEVEL_COUNT
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttributeVector(pub [f64; ATTRIBUTE_COUNT]);

impl AttributeVector {
    pub fn values(&self) -> &[f64; ATTRIBUTE_COUNT] {
        &self.0
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        attribute_index(name).map(|i| self.0[i])
    }

    pub fn node_level(&self) -> &[f64] {
        &self.0[..NODE_LEVEL_COUNT]
    }

    pub fn subgraph_level(&self) -> &[f64] {
        &self.0[NODE_LEVEL_COUNT..]
    }
}

/// `N_sg, E_sg, D_sg, P_sg, EV, DS, C_sg, BC_sg, CC_sg, EC_sg, ND_sg`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubgraphAttributes {
    pub nodes: f64,
    pub edges: f64,
    pub avg_degree: f64,
    pub leaf_fraction: f64,
    pub largest_eigenvalue: f64,
    pub density: f64,
    pub avg_clustering: f64,
    pub avg_betweenness: f64,
    pub avg_closeness: f64,
    pub avg_eigenvector: f64,
    pub avg_neighbor_degree: f64,
}

impl SubgraphAttributes {
    pub fn to_array(&self) -> [f64; ATTRIBUTE_COUNT - NODE_LEVEL_COUNT] {
        [
            self.nodes,
            self.edges,
            self.avg_degree,
            self.leaf_fraction,
            self.largest_eigenvalue,
            self.density,
            self.avg_clustering,
            self.avg_betweenness,
            self.avg_closeness,
            self.avg_eigenvector,
            self.avg_neighbor_degree,
        ]
    }
}

fn mean(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    values.sum::<f64>() / n as f64
}

pub fn subgraph_attributes(sg: &EgoSubgraph) -> SubgraphAttributes {
    let g = &sg.graph;
    let n = g.node_count();
    let e = g.edge_count();
    let nf = n as f64;
    let leaves = (0..n).filter(|&v| g.neighbors(v).len() == 1).count();
    let (eigenvalue, ec) = dominant_eigenpair(g);
    let bc = betweenness_all(g);
    SubgraphAttributes {
        nodes: nf,
        edges: e as f64,
        avg_degree: 2.0 * e as f64 / nf,
        leaf_fraction: leaves as f64 / nf,
        largest_eigenvalue: eigenvalue,
        density: if n > 1 {
            2.0 * e as f64 / (nf * (nf - 1.0))
        } else {
            0.0
        },
        avg_clustering: mean((0..n).map(|v| centrality::local_clustering(g, v)), n),
        avg_betweenness: mean(bc.into_iter(), n),
        avg_closeness: mean((0..n).map(|v| centrality::closeness(g, v)), n),
        avg_eigenvector: mean(ec.into_iter(), n),
        avg_neighbor_degree: mean((0..n).map(|v| centrality::neighbor_degree(g, v)), n),
    }
}

/// Computes attribute vectors for many targets of one graph, sharing the
/// whole-graph betweenness and eigenvector passes between them.
pub struct AttributeExtractor<'g> {
    graph: &'g Graph,
    betweenness: Vec<f64>,
    eigenvector: Vec<f64>,
}

impl<'g> AttributeExtractor<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        AttributeExtractor {
            graph,
            betweenness: betweenness_all(graph),
            eigenvector: eigenvector_centrality(graph),
        }
    }

    pub fn extract(&self, target: NodeId) -> Result<AttributeVector> {
        let g = self.graph;
        g.check_node(target)?;
        let mut out = [0.0; ATTRIBUTE_COUNT];
        out[0] = g.neighbors(target).len() as f64;
        out[1] = centrality::local_clustering(g, target);
        out[2] = self.betweenness[target];
        out[3] = centrality::closeness(g, target);
        out[4] = self.eigenvector[target];
        out[5] = centrality::neighbor_degree(g, target);
        let sub = subgraph_attributes(&g.ego_subgraph(target)?);
        out[NODE_LEVEL_COUNT..].copy_from_slice(&sub.to_array());
        Ok(AttributeVector(out))
    }
}

pub fn attribute_vector(g: &Graph, target: NodeId) -> Result<AttributeVector> {
    g.check_node(target)?;
    AttributeExtractor::new(g).extract(target)
}
