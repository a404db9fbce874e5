use std::collections::HashSet;

use super::surrogate::{best_margin, ClassScoreMatrix, FlipView};
use super::{check_budget, AttackKind, AttackPlan, ScoredFlip};
use crate::error::Result;
use crate::graph::{EdgeFlip, Graph, NodeId};

/// Direct margin attack. Each step tries every flip `(target, v)` not used
/// yet, scores it by the best wrong-class margin of the target's surrogate
/// row after the flip, and keeps the best one if it improves on the current
/// margin. Ties go to the smallest `v`.
pub fn attack_nettack(g: &Graph, target: NodeId, budget: usize) -> Result<AttackPlan> {
    g.check_node(target)?;
    check_budget(budget)?;
    let c = ClassScoreMatrix::from_labels(g);
    let own = g.label(target);
    let mut current = g.clone();
    let mut used: HashSet<NodeId> = HashSet::new();
    let mut flips = Vec::new();
    let (mut margin, _) = best_margin(&FlipView::plain(&current).propagate(&c, target), own);

    while flips.len() < budget {
        let mut best: Option<(f64, NodeId)> = None;
        for v in (0..current.node_count()).filter(|&v| v != target && !used.contains(&v)) {
            let row = FlipView::flipped(&current, target, v).propagate(&c, target);
            let (score, _) = best_margin(&row, own);
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, v));
            }
        }
        let Some((score, v)) = best.filter(|&(s, _)| s > margin) else {
            break;
        };
        let flip = EdgeFlip::toggle(&current, target, v);
        current = current.apply_flips(&[flip])?;
        used.insert(v);
        margin = score;
        flips.push(ScoredFlip { flip, score });
    }

    Ok(AttackPlan {
        attack: AttackKind::Nettack,
        target,
        budget,
        flips,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::surrogate::nettack_objective;

    fn labeled_path() -> Graph {
        Graph::new(3, [(0, 1), (1, 2)], vec![0, 1, 0], 2).unwrap()
    }

    #[test]
    fn single_step_is_exhaustive_best() {
        let g = labeled_path();
        let c = ClassScoreMatrix::from_labels(&g);
        let plan = attack_nettack(&g, 1, 1).unwrap();
        let mut best = None;
        for v in [0, 2] {
            let next = g.apply_flips(&[EdgeFlip::toggle(&g, 1, v)]).unwrap();
            let s = nettack_objective(&next, &c, 1, 0).unwrap();
            if best.is_none_or(|(b, _)| s > b) {
                best = Some((s, v));
            }
        }
        let (score, v) = best.unwrap();
        let base = nettack_objective(&g, &c, 1, 0).unwrap();
        if score > base {
            assert_eq!(plan.flips.len(), 1);
            assert_eq!(plan.flips[0].flip.v, v);
            assert!((plan.flips[0].score - score).abs() < 1e-12);
        } else {
            assert!(plan.is_empty());
        }
    }

    #[test]
    fn stops_when_nothing_improves() {
        // the target is a lone node of class 1 in a clique of class 0, already
        // fully connected; every deletion lowers the wrong-class margin
        let g = Graph::new(
            4,
            [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
            vec![1, 0, 0, 0],
            2,
        )
        .unwrap();
        let plan = attack_nettack(&g, 0, 3).unwrap();
        assert!(plan.is_empty(), "{plan:?}");
    }

    #[test]
    fn rejects_zero_budget() {
        assert!(attack_nettack(&labeled_path(), 1, 0).is_err());
        assert!(attack_nettack(&labeled_path(), 7, 1).is_err());
    }
}
