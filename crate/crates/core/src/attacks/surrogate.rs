//! The linearized two-layer surrogate `Â² C` and single-flip views of it.
//!
//! `Â = D^{-1/2} (I + A) D^{-1/2}` with `D` the self-loop-augmented degrees.
//! Only the target's row of `Â² C` is ever needed, and it depends on the
//! graph within two hops of the target, so every evaluation here walks that
//! neighborhood instead of forming a matrix.

use crate::error::{Error, Result};
use crate::graph::{EdgeFlip, FlipAction, Graph, NodeId};

/// Per-node class scores `C` (one row per node, one column per class).
#[derive(Debug, Clone, PartialEq)]
pub struct ClassScoreMatrix {
    classes: usize,
    data: Vec<f64>,
}

impl ClassScoreMatrix {
    pub fn new(rows: usize, classes: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * classes {
            return Err(Error::InvalidArgument(format!(
                "class-score data of length {} does not fill {rows}x{classes}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite class score {bad}")));
        }
        Ok(ClassScoreMatrix { classes, data })
    }

    /// One-hot label indicators: `c[j][label(j)] = 1`.
    pub fn from_labels(g: &Graph) -> Self {
        let classes = g.class_count();
        let mut data = vec![0.0; g.node_count() * classes];
        for (j, &y) in g.labels().iter().enumerate() {
            data[j * classes + y] = 1.0;
        }
        ClassScoreMatrix { classes, data }
    }

    pub fn rows(&self) -> usize {
        self.data.len() / self.classes
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn row(&self, j: NodeId) -> &[f64] {
        &self.data[j * self.classes..(j + 1) * self.classes]
    }

    pub fn get(&self, j: NodeId, class: usize) -> f64 {
        self.data[j * self.classes + class]
    }
}

pub fn class_scores_from_labels(g: &Graph) -> ClassScoreMatrix {
    ClassScoreMatrix::from_labels(g)
}

/// A graph seen through at most one pending edge flip.
#[derive(Clone, Copy)]
pub(crate) struct FlipView<'a> {
    graph: &'a Graph,
    flip: Option<(NodeId, NodeId, FlipAction)>,
}

impl<'a> FlipView<'a> {
    pub fn plain(graph: &'a Graph) -> Self {
        FlipView { graph, flip: None }
    }

    pub fn flipped(graph: &'a Graph, u: NodeId, v: NodeId) -> Self {
        let action = EdgeFlip::toggle(graph, u, v).action;
        FlipView {
            graph,
            flip: Some((u, v, action)),
        }
    }

    fn partner(&self, x: NodeId) -> Option<(NodeId, FlipAction)> {
        match self.flip {
            Some((u, v, action)) if x == u => Some((v, action)),
            Some((u, v, action)) if x == v => Some((u, action)),
            _ => None,
        }
    }

    /// Degree including the self-loop.
    pub fn augmented_degree(&self, x: NodeId) -> f64 {
        let base = self.graph.neighbors(x).len();
        let d = match self.partner(x) {
            Some((_, FlipAction::Add)) => base + 1,
            Some((_, FlipAction::Delete)) => base - 1,
            None => base,
        };
        (d + 1) as f64
    }

    /// Neighbors of `x` in `I + A`, i.e. `x` itself first, then its
    /// (possibly flipped) adjacency.
    pub fn closed_neighbors(&self, x: NodeId) -> impl Iterator<Item = NodeId> + 'a {
        let partner = self.partner(x);
        let removed = match partner {
            Some((p, FlipAction::Delete)) => Some(p),
            _ => None,
        };
        let added = match partner {
            Some((p, FlipAction::Add)) => Some(p),
            _ => None,
        };
        std::iter::once(x)
            .chain(
                self.graph
                    .neighbors(x)
                    .iter()
                    .copied()
                    .filter(move |&w| Some(w) != removed),
            )
            .chain(added)
    }

    /// Row `target` of `Â² C`.
    pub fn propagate(&self, c: &ClassScoreMatrix, target: NodeId) -> Vec<f64> {
        let mut row = vec![0.0; c.classes()];
        let d_target = self.augmented_degree(target).sqrt();
        for k in self.closed_neighbors(target) {
            let d_k = self.augmented_degree(k);
            let outer = 1.0 / (d_target * d_k);
            for j in self.closed_neighbors(k) {
                let w = outer / self.augmented_degree(j).sqrt();
                for (acc, cj) in row.iter_mut().zip(c.row(j)) {
                    *acc += w * cj;
                }
            }
        }
        row
    }
}

/// Row `target` of `Â² C`.
pub fn surrogate_row(g: &Graph, c: &ClassScoreMatrix, target: NodeId) -> Result<Vec<f64>> {
    g.check_node(target)?;
    check_shape(g, c)?;
    Ok(FlipView::plain(g).propagate(c, target))
}

pub(crate) fn check_shape(g: &Graph, c: &ClassScoreMatrix) -> Result<()> {
    if c.rows() != g.node_count() {
        return Err(Error::DimensionMismatch {
            expected: g.node_count(),
            got: c.rows(),
        });
    }
    Ok(())
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Class the one-hot surrogate assigns to `target`.
pub fn surrogate_prediction(g: &Graph, target: NodeId) -> Result<usize> {
    let c = ClassScoreMatrix::from_labels(g);
    Ok(argmax(&surrogate_row(g, &c, target)?))
}

/// `[Â²C]_{target, attack_class} - [Â²C]_{target, label(target)}`: the margin
/// the direct attack tries to push above zero.
pub fn nettack_objective(
    g: &Graph,
    c: &ClassScoreMatrix,
    target: NodeId,
    attack_class: usize,
) -> Result<f64> {
    g.check_node(target)?;
    check_shape(g, c)?;
    let own = g.label(target);
    if attack_class == own {
        return Err(Error::SameClass(attack_class));
    }
    if attack_class >= c.classes() {
        return Err(Error::InvalidArgument(format!(
            "attack class {attack_class} outside [0, {})",
            c.classes()
        )));
    }
    let row = FlipView::plain(g).propagate(c, target);
    Ok(row[attack_class] - row[own])
}

/// Largest margin of any wrong class over the true one, and that class.
pub(crate) fn best_margin(row: &[f64], own: usize) -> (f64, usize) {
    let mut best: Option<(f64, usize)> = None;
    for (y, &v) in row.iter().enumerate() {
        if y == own {
            continue;
        }
        let margin = v - row[own];
        if best.is_none_or(|(m, _)| margin > m) {
            best = Some((margin, y));
        }
    }
    best.expect("at least two classes")
}

/// Exact change of row `target` of `Â² C` when the pair `(u, v)` is toggled.
pub fn row_delta(
    g: &Graph,
    c: &ClassScoreMatrix,
    target: NodeId,
    u: NodeId,
    v: NodeId,
) -> Result<Vec<f64>> {
    validate_pair(g, u, v)?;
    g.check_node(target)?;
    check_shape(g, c)?;
    let before = FlipView::plain(g).propagate(c, target);
    let after = FlipView::flipped(g, u, v).propagate(c, target);
    Ok(after.iter().zip(&before).map(|(a, b)| a - b).collect())
}

pub(crate) fn validate_pair(g: &Graph, u: NodeId, v: NodeId) -> Result<()> {
    g.check_node(u)?;
    g.check_node(v)?;
    if u == v {
        return Err(Error::SelfLoop(u));
    }
    Ok(())
}

pub fn softmax(values: &[f64]) -> Vec<f64> {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = values.iter().map(|v| (v - max).exp()).collect();
    let total: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / total).collect()
}

/// Softmax/cross-entropy gradient `p - e_y` at the target's current row.
pub(crate) fn loss_gradient(row: &[f64], own: usize) -> Vec<f64> {
    let mut grad = softmax(row);
    grad[own] -= 1.0;
    grad
}

/// Discrete meta-gradient proxy for toggling `(u, v)`:
/// `(softmax(row) - e_label) · Δrow`. Positive values mean the flip raises the
/// target's cross-entropy loss under the surrogate.
pub fn meta_gradient_proxy(
    g: &Graph,
    c: &ClassScoreMatrix,
    target: NodeId,
    u: NodeId,
    v: NodeId,
) -> Result<f64> {
    let delta = row_delta(g, c, target, u, v)?;
    let row = FlipView::plain(g).propagate(c, target);
    let grad = loss_gradient(&row, g.label(target));
    Ok(dot(&grad, &delta))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
