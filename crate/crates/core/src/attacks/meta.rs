use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::surrogate::{dot, loss_gradient, ClassScoreMatrix, FlipView};
use super::{check_budget, AttackKind, AttackPlan, ScoredFlip};
use crate::error::Result;
use crate::graph::{EdgeFlip, Graph, NodeId, EGO_RADIUS};

/// Which node pairs the meta attack considers at each step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetaScope {
    /// Pairs with at least one endpoint within two hops of the target.
    #[default]
    Local,
    /// Every node pair. Pairs outside the local scope leave the target's
    /// surrogate row unchanged and so score exactly 0.
    Global,
}

pub fn attack_meta(g: &Graph, target: NodeId, budget: usize) -> Result<AttackPlan> {
    attack_meta_with(g, target, budget, MetaScope::Local)
}

/// Greedy meta-gradient attack. Each step scores every candidate pair by
/// `(softmax(row) - e_label) · Δrow`, where `Δrow` is the exact change of the
/// target's `Â² C` row under that flip, and applies the best one. `Δrow` is
/// measured along the flip direction (insertion for absent pairs, deletion
/// for present ones), so it already carries the `1 - 2 a_uv` orientation.
/// Stops early once no candidate raises the loss. Ties go to the
/// lexicographically smallest pair.
pub fn attack_meta_with(
    g: &Graph,
    target: NodeId,
    budget: usize,
    scope: MetaScope,
) -> Result<AttackPlan> {
    g.check_node(target)?;
    check_budget(budget)?;
    let c = ClassScoreMatrix::from_labels(g);
    let mut current = g.clone();
    let mut used: HashSet<(NodeId, NodeId)> = HashSet::new();
    let mut flips = Vec::new();

    while flips.len() < budget {
        let Some((score, (u, v))) = best_flip(&current, &c, target, &used, scope) else {
            break;
        };
        if score <= 0.0 {
            break;
        }
        let flip = EdgeFlip::toggle(&current, u, v);
        current = current.apply_flips(&[flip])?;
        used.insert((u, v));
        flips.push(ScoredFlip { flip, score });
    }

    Ok(AttackPlan {
        attack: AttackKind::Meta,
        target,
        budget,
        flips,
    })
}

fn best_flip(
    g: &Graph,
    c: &ClassScoreMatrix,
    target: NodeId,
    used: &HashSet<(NodeId, NodeId)>,
    scope: MetaScope,
) -> Option<(f64, (NodeId, NodeId))> {
    let n = g.node_count();
    let base = FlipView::plain(g).propagate(c, target);
    let grad = loss_gradient(&base, g.label(target));
    let dist = g.bfs_within(target, EGO_RADIUS);
    let near = |x: NodeId| dist[x].is_some();

    let score_of = |u: NodeId, v: NodeId| -> f64 {
        let row = FlipView::flipped(g, u, v).propagate(c, target);
        let delta: Vec<f64> = row.iter().zip(&base).map(|(a, b)| a - b).collect();
        dot(&grad, &delta)
    };
    // With one endpoint at distance 1 or 2 and the other beyond two hops,
    // the far endpoint only enters the target's row through its class scores
    // and degree, so those scores are shared.
    let mut shared: HashMap<(NodeId, NodeId, usize, bool), f64> = HashMap::new();
    let mut best: Option<(f64, (NodeId, NodeId))> = None;
    let mut consider = |u: NodeId, v: NodeId, score: f64| {
        if best.is_none_or(|(s, _)| score > s) {
            best = Some((score, (u, v)));
        }
    };

    // lexicographic enumeration of pairs (u, v), u < v
    let local: Vec<NodeId> = (0..n).filter(|&x| near(x)).collect();
    for u in 0..n {
        let partners: Box<dyn Iterator<Item = NodeId>> = if near(u) || scope == MetaScope::Global {
            Box::new(u + 1..n)
        } else {
            Box::new(local.iter().copied().filter(move |&v| v > u))
        };
        for v in partners {
            if used.contains(&(u, v)) {
                continue;
            }
            let score = match (near(u), near(v)) {
                (false, false) => 0.0,
                (true, true) => score_of(u, v),
                (nu, _) => {
                    let (inner, outer) = if nu { (u, v) } else { (v, u) };
                    if inner == target {
                        score_of(u, v)
                    } else {
                        let key = (
                            inner,
                            g.label(outer),
                            g.neighbors(outer).len(),
                            g.has_edge(inner, outer),
                        );
                        *shared.entry(key).or_insert_with(|| score_of(u, v))
                    }
                }
            };
            consider(u, v, score);
        }
    }
    best
}
