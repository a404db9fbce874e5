//! Greedy structure attacks against a single target node.
//!
//! All three attacks run against the one-hot surrogate `softmax(Â² C)` with
//! `C` the label indicator matrix, so no trained model or node features are
//! needed:
//!
//! * [`attack_nettack`]: direct attack maximizing the wrong-class margin of
//!   the target's surrogate row, over flips incident to the target.
//! * [`attack_meta`]: greedy meta-gradient attack, scoring flips anywhere in
//!   the target's 2-hop neighborhood by the loss change they induce.
//! * [`attack_gradargmax`]: deletes the ego-subgraph edges with the smallest
//!   augmented degree product, i.e. the largest `1/sqrt(d_u d_v)` gradient.

mod gradargmax;
mod meta;
mod nettack;
pub mod surrogate;

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use gradargmax::{attack_gradargmax, GRADARGMAX_BUDGET};
pub use meta::{attack_meta, attack_meta_with, MetaScope};
pub use nettack::attack_nettack;
pub use surrogate::{
    class_scores_from_labels, meta_gradient_proxy, nettack_objective, row_delta,
    surrogate_prediction, surrogate_row, ClassScoreMatrix,
};

use crate::error::{Error, Result};
use crate::graph::{EdgeFlip, Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackKind {
    Nettack,
    Meta,
    GradArgmax,
}

impl AttackKind {
    pub const ALL: [AttackKind; 3] = [AttackKind::Nettack, AttackKind::Meta, AttackKind::GradArgmax];

    pub fn name(self) -> &'static str {
        match self {
            AttackKind::Nettack => "nettack",
            AttackKind::Meta => "meta",
            AttackKind::GradArgmax => "gradargmax",
        }
    }

    /// `max(1, degree)` for the margin attacks, 2 deletions for GradArgmax.
    pub fn default_budget(self, g: &Graph, target: NodeId) -> usize {
        match self {
            AttackKind::Nettack | AttackKind::Meta => g.neighbors(target).len().max(1),
            AttackKind::GradArgmax => GRADARGMAX_BUDGET,
        }
    }

    pub fn run(self, g: &Graph, target: NodeId, budget: usize) -> Result<AttackPlan> {
        match self {
            AttackKind::Nettack => attack_nettack(g, target, budget),
            AttackKind::Meta => attack_meta(g, target, budget),
            AttackKind::GradArgmax => attack_gradargmax(g, target, budget),
        }
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AttackKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AttackKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown attack {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredFlip {
    pub flip: EdgeFlip,
    pub score: f64,
}

/// Ordered edge flips one attack chose against one target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackPlan {
    pub attack: AttackKind,
    pub target: NodeId,
    pub budget: usize,
    pub flips: Vec<ScoredFlip>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSummary {
    pub attack: AttackKind,
    pub target: NodeId,
    pub budget: usize,
    pub flips: usize,
    pub success: bool,
}

impl AttackPlan {
    pub fn edge_flips(&self) -> Vec<EdgeFlip> {
        self.flips.iter().map(|f| f.flip).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.flips.is_empty()
    }

    pub fn apply(&self, g: &Graph) -> Result<Graph> {
        g.apply_flips(&self.edge_flips())
    }

    /// `attack target u v action score`, one line per flip.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for f in &self.flips {
            writeln!(
                out,
                "{} {} {} {} {} {}",
                self.attack, self.target, f.flip.u, f.flip.v, f.flip.action, f.score
            )
            .unwrap();
        }
        out
    }

    pub fn summary(&self, success: bool) -> PlanSummary {
        PlanSummary {
            attack: self.attack,
            target: self.target,
            budget: self.budget,
            flips: self.flips.len(),
            success,
        }
    }
}

/// Whether the surrogate's predicted class for the target differs between
/// the two graphs.
pub fn prediction_changed(clean: &Graph, perturbed: &Graph, target: NodeId) -> Result<bool> {
    Ok(surrogate_prediction(clean, target)? != surrogate_prediction(perturbed, target)?)
}

pub(crate) fn check_budget(budget: usize) -> Result<()> {
    if budget == 0 {
        return Err(Error::InvalidArgument("attack budget must be at least 1".into()));
    }
    Ok(())
}
