//! Node-level structural measures.
//!
//! All functions are total on valid node ids: degenerate inputs (isolated
//! nodes, edgeless graphs) map to 0 rather than NaN.


use crate::error::Result;
use crate::graph::{Graph, NodeId};

/// Convergence threshold on the largest per-component change between
/// successive power-iteration vectors.
pub const POWER_TOLERANCE: f64 = 1e-12;
pub const POWER_MAX_ITERATIONS: usize = 10_000;

/// `2 L / (D (D - 1))`, where `L` counts edges among the neighbors of `node`.
pub fn clustering_coefficient(g: &Graph, node: NodeId) -> Result<f64> {
    g.check_node(node)?;
    Ok(local_clustering(g, node))
}

pub(crate) fn local_clustering(g: &Graph, node: NodeId) -> f64 {
    let nbrs = g.neighbors(node);
    let d = nbrs.len();
    if d < 2 {
        return 0.0;
    }
    let mut links = 0usize;
    for (idx, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[idx + 1..] {
            if g.has_edge(a, b) {
                links += 1;
            }
        }
    }
    2.0 * links as f64 / (d * (d - 1)) as f64
}

/// Unnormalized shortest-path betweenness of every node, summed over
/// unordered source/target pairs (Brandes' accumulation).
pub fn betweenness_all(g: &Graph) -> Vec<f64> {
    const UNSEEN: u32 = u32::MAX;
    let n = g.node_count();
    let mut centrality = vec![0.0; n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![UNSEEN; n];
    let mut delta = vec![0.0f64; n];
    // BFS order doubles as the queue
    let mut order: Vec<NodeId> = Vec::with_capacity(n);
    for source in 0..n {
        if g.neighbors(source).is_empty() {
            continue;
        }
        for &v in &order {
            sigma[v] = 0.0;
            dist[v] = UNSEEN;
            delta[v] = 0.0;
        }
        order.clear();
        sigma[source] = 1.0;
        dist[source] = 0;
        order.push(source);
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            let next = dist[v] + 1;
            for &w in g.neighbors(v) {
                if dist[w] == UNSEEN {
                    dist[w] = next;
                    order.push(w);
                }
                if dist[w] == next {
                    sigma[w] += sigma[v];
                }
            }
        }
        for &w in order.iter().rev() {
            let coeff = (1.0 + delta[w]) / sigma[w];
            let prev = dist[w].wrapping_sub(1);
            for &v in g.neighbors(w) {
                if dist[v] == prev {
                    delta[v] += sigma[v] * coeff;
                }
            }
            if w != source {
                centrality[w] += delta[w];
            }
        }
    }
    // each unordered pair was visited from both ends
    centrality.iter_mut().for_each(|c| *c /= 2.0);
    centrality
}

pub fn betweenness_centrality(g: &Graph, node: NodeId) -> Result<f64> {
    g.check_node(node)?;
    Ok(betweenness_all(g)[node])
}

/// Closeness restricted to the node's connected component:
/// `R / sum(d)` scaled by `(R - 1) / (N - 1)`, with `R` the component size.
/// Isolated nodes score 0.
pub fn closeness_centrality(g: &Graph, node: NodeId) -> Result<f64> {
    g.check_node(node)?;
    Ok(closeness(g, node))
}

pub(crate) fn closeness(g: &Graph, node: NodeId) -> f64 {
    let n = g.node_count();
    let dist = g.bfs_distances(node);
    let (reach, total) = dist
        .iter()
        .flatten()
        .fold((0usize, 0usize), |(r, t), &d| (r + 1, t + d));
    if reach < 2 || total == 0 {
        return 0.0;
    }
    let reach = reach as f64;
    (reach / total as f64) * (reach - 1.0) / (n as f64 - 1.0)
}

/// Dominant eigenvalue and unit-norm nonnegative eigenvector of the
/// adjacency matrix by power iteration from the all-ones vector.
///
/// Iterates `x <- (A x + x) / |A x + x|`; the shift keeps bipartite graphs
/// from oscillating without moving the dominant eigenvector. Edgeless graphs
/// yield `(0, 0-vector)`, and isolated nodes always get exactly 0.
pub fn dominant_eigenpair(g: &Graph) -> (f64, Vec<f64>) {
    let n = g.node_count();
    if g.edge_count() == 0 {
        return (0.0, vec![0.0; n]);
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut next = vec![0.0; n];
    for _ in 0..POWER_MAX_ITERATIONS {
        for (v, out) in next.iter_mut().enumerate() {
            *out = x[v] + g.neighbors(v).iter().map(|&w| x[w]).sum::<f64>();
        }
        let norm = next.iter().map(|a| a * a).sum::<f64>().sqrt();
        let mut change = 0.0f64;
        for (xi, ni) in x.iter_mut().zip(&next) {
            let updated = ni / norm;
            change = change.max((updated - *xi).abs());
            *xi = updated;
        }
        if change < POWER_TOLERANCE {
            break;
        }
    }
    for (v, xi) in x.iter_mut().enumerate() {
        if g.neighbors(v).is_empty() {
            *xi = 0.0;
        }
    }
    let rayleigh: f64 = (0..n)
        .map(|v| x[v] * g.neighbors(v).iter().map(|&w| x[w]).sum::<f64>())
        .sum();
    (rayleigh.max(0.0), x)
}

pub fn eigenvector_centrality(g: &Graph) -> Vec<f64> {
    dominant_eigenpair(g).1
}

pub fn largest_eigenvalue(g: &Graph) -> f64 {
    dominant_eigenpair(g).0
}

pub fn avg_neighbor_degree(g: &Graph, node: NodeId) -> Result<f64> {
    g.check_node(node)?;
    Ok(neighbor_degree(g, node))
}

pub(crate) fn neighbor_degree(g: &Graph, node: NodeId) -> f64 {
    let nbrs = g.neighbors(node);
    if nbrs.is_empty() {
        return 0.0;
    }
    nbrs.iter().map(|&j| g.neighbors(j).len()).sum::<usize>() as f64 / nbrs.len() as f64
}
