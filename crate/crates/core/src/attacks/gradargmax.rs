use super::{check_budget, AttackKind, AttackPlan, ScoredFlip};
use crate::error::Result;
use crate::graph::{EdgeFlip, Graph, NodeId};

/// Deletions allowed per target.
pub const GRADARGMAX_BUDGET: usize = 2;

/// Deletes up to `budget` edges of the target's 2-hop ego-subgraph, each
/// time picking the edge with the smallest `sqrt(d_u d_v)` (self-loop
/// augmented degrees in the current graph). The recorded score is the
/// gradient magnitude `1 / sqrt(d_u d_v)`. Ties go to the smallest pair.
pub fn attack_gradargmax(g: &Graph, target: NodeId, budget: usize) -> Result<AttackPlan> {
    g.check_node(target)?;
    check_budget(budget)?;
    let mut current = g.clone();
    let mut flips = Vec::new();
    while flips.len() < budget {
        let ego = current.ego_subgraph(target)?;
        let aug = |x: NodeId| (current.neighbors(x).len() + 1) as f64;
        let pick = ego
            .parent_edges()
            .map(|(u, v)| ((aug(u) * aug(v)).sqrt(), (u, v)))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let Some((key, (u, v))) = pick else {
            break;
        };
        let flip = EdgeFlip::delete(u, v);
        current = current.apply_flips(&[flip])?;
        flips.push(ScoredFlip {
            flip,
            score: 1.0 / key,
        });
    }
    Ok(AttackPlan {
        attack: AttackKind::GradArgmax,
        target,
        budget,
        flips,
    })
}
