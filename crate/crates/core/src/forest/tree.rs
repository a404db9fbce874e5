use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{gini_of, Dataset};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TreeNode {
    /// Rows with `value <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf { counts: Vec<usize> },
}

impl TreeNode {
    pub fn leaf(&self, x: &[f64]) -> &[usize] {
        let mut node = self;
        loop {
            match node {
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if x[*feature] <= *threshold { left } else { right },
                TreeNode::Leaf { counts } => return counts,
            }
        }
    }

    /// Class frequencies of the leaf `x` falls into.
    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let counts = self.leaf(x);
        let total: usize = counts.iter().sum();
        counts.iter().map(|&c| c as f64 / total as f64).collect()
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
            TreeNode::Leaf { .. } => 0,
        }
    }

    pub fn split_count(&self) -> usize {
        match self {
            TreeNode::Split { left, right, .. } => 1 + left.split_count() + right.split_count(),
            TreeNode::Leaf { .. } => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or too small.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub features_per_split: usize,
}

struct Grower<'a, R> {
    data: &'a Dataset,
    params: TreeParams,
    rng: &'a mut R,
    root_size: f64,
    /// Sample-weighted impurity decrease per feature.
    importance: Vec<f64>,
}

struct Candidate {
    decrease: f64,
    feature: usize,
    threshold: f64,
    split_at: usize,
    order: Vec<usize>,
}

impl Candidate {
    fn beats(&self, other: &Candidate) -> bool {
        if self.decrease != other.decrease {
            return self.decrease > other.decrease;
        }
        (self.feature, self.threshold) < (other.feature, other.threshold)
    }
}

/// Grows a tree over `rows` (indices into `data`, repeats allowed) and
/// returns it with the per-feature impurity decrease it accumulated.
pub(crate) fn grow<R: Rng>(
    data: &Dataset,
    rows: Vec<usize>,
    params: TreeParams,
    rng: &mut R,
) -> (TreeNode, Vec<f64>) {
    let mut grower = Grower {
        data,
        params,
        root_size: rows.len() as f64,
        rng,
        importance: vec![0.0; data.dim()],
    };
    let root = grower.node(rows, 0);
    (root, grower.importance)
}

impl<R: Rng> Grower<'_, R> {
    fn counts(&self, rows: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.data.class_count()];
        for &r in rows {
            counts[self.data.targets()[r]] += 1;
        }
        counts
    }

    fn node(&mut self, rows: Vec<usize>, depth: usize) -> TreeNode {
        let counts = self.counts(&rows);
        let impurity = gini_of(&counts);
        let min_leaf = self.params.min_leaf.max(1);
        let stop = impurity == 0.0
            || self.params.max_depth.is_some_and(|d| depth >= d)
            || rows.len() < 2 * min_leaf;
        if stop {
            return TreeNode::Leaf { counts };
        }
        let Some(best) = self.best_split(&rows, &counts, impurity) else {
            return TreeNode::Leaf { counts };
        };
        self.importance[best.feature] += rows.len() as f64 / self.root_size * best.decrease;
        let (left, right) = best.order.split_at(best.split_at);
        let (left, right) = (left.to_vec(), right.to_vec());
        TreeNode::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: Box::new(self.node(left, depth + 1)),
            right: Box::new(self.node(right, depth + 1)),
        }
    }

    fn best_split(&mut self, rows: &[usize], counts: &[usize], impurity: f64) -> Option<Candidate> {
        let dim = self.data.dim();
        let k = self.params.features_per_split.clamp(1, dim);
        // a full random order: the first k are the draw, the rest are only
        // consulted while no valid split has been found
        let order: Vec<usize> = sample(self.rng, dim, dim).into_vec();
        let mut drawn = order[..k].to_vec();
        drawn.sort_unstable();
        let mut best = self.best_among(&drawn, rows, counts, impurity);
        for &feature in &order[k..] {
            if best.is_some() {
                break;
            }
            best = self.best_among(&[feature], rows, counts, impurity);
        }
        best
    }

    fn best_among(&self, features: &[usize], rows: &[usize], counts: &[usize], impurity: f64) -> Option<Candidate> {
        let n = rows.len() as f64;
        let min_leaf = self.params.min_leaf.max(1);
        let mut best: Option<Candidate> = None;

        for &feature in features {
            let value = |r: usize| self.data.features()[r][feature];
            let mut order = rows.to_vec();
            order.sort_by(|&a, &b| value(a).total_cmp(&value(b)).then(a.cmp(&b)));
            let mut left = vec![0usize; counts.len()];
            let mut right = counts.to_vec();
            let mut local: Option<(f64, f64, usize)> = None;
            for i in 1..order.len() {
                let moved = self.data.targets()[order[i - 1]];
                left[moved] += 1;
                right[moved] -= 1;
                let (lo, hi) = (value(order[i - 1]), value(order[i]));
                if lo == hi || i < min_leaf || order.len() - i < min_leaf {
                    continue;
                }
                let weighted =
                    (i as f64 * gini_of(&left) + (n - i as f64) * gini_of(&right)) / n;
                let decrease = impurity - weighted;
                // strict: keeps the lowest threshold among equal decreases
                if local.is_none_or(|(d, _, _)| decrease > d) {
                    local = Some((decrease, lo + (hi - lo) / 2.0, i));
                }
            }
            if let Some((decrease, threshold, split_at)) = local {
                let cand = Candidate {
                    decrease,
                    feature,
                    threshold,
                    split_at,
                    order,
                };
                if best.as_ref().is_none_or(|b| cand.beats(b)) {
                    best = Some(cand);
                }
            }
        }
        best
    }
}
