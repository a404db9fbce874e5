//! CART decision trees with Gini splits, bagged into a random forest, with
//! Gini importance (mean decrease in impurity) for ranking features.

mod tree;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use tree::{TreeNode, TreeParams};

use crate::error::{Error, Result};

/// Rows of fixed-width feature vectors with dense class indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<Vec<f64>>,
    targets: Vec<usize>,
    feature_names: Vec<String>,
    class_count: usize,
}

impl Dataset {
    /// `class_count` defaults to `max(target) + 1`.
    pub fn new(
        features: Vec<Vec<f64>>,
        targets: Vec<usize>,
        feature_names: Vec<String>,
        class_count: Option<usize>,
    ) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::InsufficientSamples("dataset has no rows".into()));
        }
        if features.len() != targets.len() {
            return Err(Error::InvalidArgument(format!(
                "{} feature rows but {} targets",
                features.len(),
                targets.len()
            )));
        }
        let dim = feature_names.len();
        if let Some(row) = features.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: row.len(),
            });
        }
        let observed = targets.iter().max().map_or(0, |&m| m + 1);
        let class_count = class_count.unwrap_or(observed);
        if observed > class_count {
            return Err(Error::InvalidArgument(format!(
                "target {} outside [0, {class_count})",
                observed - 1
            )));
        }
        Ok(Dataset {
            features,
            targets,
            feature_names,
            class_count: class_count.max(1),
        })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Keeps only the given columns, in the given order.
    pub fn select_features(&self, columns: &[usize]) -> Dataset {
        Dataset {
            features: self
                .features
                .iter()
                .map(|r| columns.iter().map(|&c| r[c]).collect())
                .collect(),
            targets: self.targets.clone(),
            feature_names: columns.iter().map(|&c| self.feature_names[c].clone()).collect(),
            class_count: self.class_count,
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            features: rows.iter().map(|&r| self.features[r].clone()).collect(),
            targets: rows.iter().map(|&r| self.targets[r]).collect(),
            feature_names: self.feature_names.clone(),
            class_count: self.class_count,
        }
    }
}

/// `1 - sum (n_c / n)^2`.
pub fn gini_impurity(counts: &[usize]) -> Result<f64> {
    if counts.iter().sum::<usize>() == 0 {
        return Err(Error::InvalidArgument("empty class histogram".into()));
    }
    Ok(gini_of(counts))
}

pub(crate) fn gini_of(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

/// A single tree on all rows of `data`.
pub fn train_tree(data: &Dataset, params: TreeParams, seed: u64) -> TreeNode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    tree::grow(data, (0..data.len()).collect(), params, &mut rng).0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// `None` means `ceil(sqrt(F))`.
    pub features_per_split: Option<usize>,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: None,
            min_leaf: 1,
            features_per_split: None,
            seed: 0,
        }
    }
}

impl ForestParams {
    pub fn with_seed(seed: u64) -> Self {
        ForestParams {
            seed,
            ..Default::default()
        }
    }

    fn tree_params(&self, dim: usize) -> TreeParams {
        TreeParams {
            max_depth: self.max_depth,
            min_leaf: self.min_leaf,
            features_per_split: self
                .features_per_split
                .unwrap_or_else(|| (dim as f64).sqrt().ceil() as usize),
        }
    }
}

pub const FOREST_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub format_version: u32,
    pub seed: u64,
    pub class_count: usize,
    pub feature_names: Vec<String>,
    /// Normalized Gini importance, summing to 1.
    pub importances: Vec<f64>,
    /// Set when no tree made an impurity-reducing split; `importances` is
    /// then uniform.
    pub uniform_importances: bool,
    pub trees: Vec<TreeNode>,
}

/// Per-tree RNG seed; depends only on the forest seed and the tree index so
/// training order never changes the result.
fn tree_seed(seed: u64, index: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ (index as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn train_forest(data: &Dataset, params: &ForestParams) -> Result<Forest> {
    if data.is_empty() {
        return Err(Error::InsufficientSamples("dataset has no rows".into()));
    }
    if params.n_trees == 0 {
        return Err(Error::InvalidArgument("forest needs at least one tree".into()));
    }
    let tree_params = params.tree_params(data.dim());
    let grown: Vec<(TreeNode, Vec<f64>)> = (0..params.n_trees)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(tree_seed(params.seed, i));
            let rows: Vec<usize> = (0..data.len()).map(|_| rng.gen_range(0..data.len())).collect();
            tree::grow(data, rows, tree_params, &mut rng)
        })
        .collect();

    let dim = data.dim();
    let mut importances = vec![0.0; dim];
    for (_, imp) in &grown {
        for (acc, x) in importances.iter_mut().zip(imp) {
            *acc += x / params.n_trees as f64;
        }
    }
    let total: f64 = importances.iter().sum();
    let uniform_importances = total <= 0.0;
    if uniform_importances {
        log::warn!("forest made no impurity-reducing split; reporting uniform importances");
        importances.iter_mut().for_each(|x| *x = 1.0 / dim as f64);
    } else {
        importances.iter_mut().for_each(|x| *x /= total);
    }

    Ok(Forest {
        format_version: FOREST_FORMAT_VERSION,
        seed: params.seed,
        class_count: data.class_count(),
        feature_names: data.feature_names().to_vec(),
        importances,
        uniform_importances,
        trees: grown.into_iter().map(|(t, _)| t).collect(),
    })
}

impl Forest {
    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.feature_names.len() {
            return Err(Error::DimensionMismatch {
                expected: self.feature_names.len(),
                got: x.len(),
            });
        }
        let mut proba = vec![0.0; self.class_count];
        for tree in &self.trees {
            for (acc, p) in proba.iter_mut().zip(tree.predict_proba(x)) {
                *acc += p;
            }
        }
        let n = self.trees.len() as f64;
        proba.iter_mut().for_each(|p| *p /= n);
        Ok(proba)
    }

    /// Most probable class; ties go to the lower index.
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        Ok(crate::attacks::surrogate::argmax(&self.predict_proba(x)?))
    }

    /// Feature indices by decreasing importance (ties by index).
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.importances.len()).collect();
        order.sort_by(|&a, &b| {
            self.importances[b]
                .total_cmp(&self.importances[a])
                .then(a.cmp(&b))
        });
        order
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let forest: Forest = serde_json::from_str(text)?;
        if forest.format_version != FOREST_FORMAT_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported forest format version {}",
                forest.format_version
            )));
        }
        Ok(forest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("f{i}")).collect()
    }

    fn xor() -> Dataset {
        Dataset::new(
            vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]],
            vec![0, 1, 1, 0],
            names(2),
            None,
        )
        .unwrap()
    }

    #[test]
    fn gini_closed_forms() {
        assert_eq!(gini_impurity(&[5]).unwrap(), 0.0);
        assert_eq!(gini_impurity(&[3, 0]).unwrap(), 0.0);
        assert_eq!(gini_impurity(&[4, 4]).unwrap(), 0.5);
        assert_eq!(gini_impurity(&[1, 1, 1, 1]).unwrap(), 0.75);
        assert!(gini_impurity(&[0, 0]).is_err());
        assert!(gini_impurity(&[]).is_err());
    }

    #[test]
    fn single_class_is_one_leaf() {
        let d = Dataset::new(vec![vec![1.0], vec![2.0]], vec![0, 0], names(1), Some(2)).unwrap();
        let t = train_tree(&d, TreeParams { max_depth: None, min_leaf: 1, features_per_split: 1 }, 0);
        assert_eq!(t, TreeNode::Leaf { counts: vec![2, 0] });
    }

    #[test]
    fn one_dimensional_split_at_midpoint() {
        let d = Dataset::new(vec![vec![0.0], vec![1.0]], vec![0, 1], names(1), None).unwrap();
        let t = train_tree(&d, TreeParams { max_depth: None, min_leaf: 1, features_per_split: 1 }, 0);
        match t {
            TreeNode::Split { feature: 0, threshold, left, right } => {
                assert_eq!(threshold, 0.5);
                assert_eq!(*left, TreeNode::Leaf { counts: vec![1, 0] });
                assert_eq!(*right, TreeNode::Leaf { counts: vec![0, 1] });
            }
            other => panic!("expected a split, got {other:?}"),
        }
    }

    #[test]
    fn xor_learned_at_depth_two() {
        let d = xor();
        let t = train_tree(&d, TreeParams { max_depth: Some(2), min_leaf: 1, features_per_split: 2 }, 7);
        for (x, &y) in d.features().iter().zip(d.targets()) {
            assert_eq!(crate::attacks::surrogate::argmax(&t.predict_proba(x)), y);
        }
        assert_eq!(t.depth(), 2);
    }

    #[test]
    fn no_split_forest_reports_uniform_importance() {
        let d = Dataset::new(vec![vec![3.0, 1.0, 2.0]], vec![0], names(3), Some(2)).unwrap();
        let f = train_forest(&d, &ForestParams { n_trees: 1, ..Default::default() }).unwrap();
        assert!(f.uniform_importances);
        assert!(f.importances.iter().all(|&x| (x - 1.0 / 3.0).abs() < 1e-15));
        assert!(matches!(f.trees[0], TreeNode::Leaf { .. }));
    }

    #[test]
    fn predict_proba_dimension_check() {
        let f = train_forest(&xor(), &ForestParams { n_trees: 3, ..Default::default() }).unwrap();
        assert!(matches!(f.predict_proba(&[0.0]), Err(Error::DimensionMismatch { .. })));
        let p = f.predict_proba(&[0.0, 1.0]).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let f = train_forest(&xor(), &ForestParams { n_trees: 4, ..Default::default() }).unwrap();
        let back = Forest::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(back, f);
        let bad = f.to_json().unwrap().replace("\"format_version\": 1", "\"format_version\": 9");
        assert!(Forest::from_json(&bad).is_err());
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::new(vec![], vec![], names(1), None).is_err());
        assert!(Dataset::new(vec![vec![1.0, 2.0]], vec![0], names(1), None).is_err());
        assert!(Dataset::new(vec![vec![1.0]], vec![3], names(1), Some(2)).is_err());
    }
}
