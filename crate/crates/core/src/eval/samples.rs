use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attacks::{prediction_changed, AttackKind, AttackPlan};
use crate::attributes::{attribute_vector, AttributeExtractor, AttributeVector};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

pub const CLEAN: usize = 0;
pub const ADVERSARIAL: usize = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionSample {
    pub attributes: AttributeVector,
    /// [`CLEAN`] or [`ADVERSARIAL`].
    pub label: usize,
    /// Set on adversarial samples.
    pub attack: Option<AttackKind>,
    pub target: NodeId,
    pub dataset: String,
}

impl DetectionSample {
    pub fn is_adversarial(&self) -> bool {
        self.label == ADVERSARIAL
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub plan: AttackPlan,
    pub success: bool,
}

/// Paired clean/adversarial samples for one attack on one graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectionDataset {
    pub dataset: String,
    pub attack: AttackKind,
    pub samples: Vec<DetectionSample>,
    pub attempts: Vec<AttemptRecord>,
    /// Human-readable note when no attack succeeded.
    pub diagnostic: Option<String>,
}

impl DetectionDataset {
    pub fn attempted(&self) -> usize {
        self.attempts.len()
    }

    pub fn successful(&self) -> usize {
        self.attempts.iter().filter(|a| a.success).count()
    }

    pub fn success_rate(&self) -> f64 {
        if self.attempts.is_empty() {
            0.0
        } else {
            self.successful() as f64 / self.attempted() as f64
        }
    }

    pub fn require_samples(&self) -> Result<&[DetectionSample]> {
        if self.samples.is_empty() {
            return Err(Error::NoSuccessfulAttacks {
                attack: self.attack.to_string(),
                attempted: self.attempted(),
            });
        }
        Ok(&self.samples)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetOptions {
    pub n_targets: usize,
    pub seed: u64,
    /// Overrides the attack's default per-target budget.
    pub budget: Option<usize>,
}

/// Draws `n_targets` distinct targets (capped at the node count), attacks
/// each, keeps the plans that change the surrogate's prediction, and emits a
/// clean sample from `g` plus an adversarial sample from the perturbed graph
/// for every kept target.
pub fn build_detection_dataset(
    g: &Graph,
    attack: AttackKind,
    n_targets: usize,
    seed: u64,
    dataset: &str,
) -> Result<DetectionDataset> {
    build_detection_dataset_with(
        g,
        attack,
        dataset,
        &DatasetOptions {
            n_targets,
            seed,
            budget: None,
        },
    )
}

pub fn build_detection_dataset_with(
    g: &Graph,
    attack: AttackKind,
    dataset: &str,
    opts: &DatasetOptions,
) -> Result<DetectionDataset> {
    if opts.n_targets == 0 {
        return Err(Error::InvalidArgument("n_targets must be at least 1".into()));
    }
    if opts.budget == Some(0) {
        return Err(Error::InvalidArgument("attack budget must be at least 1".into()));
    }
    let targets = sample_targets(g, opts.n_targets, opts.seed);

    let outcomes: Vec<(AttackPlan, Option<Graph>)> = targets
        .par_iter()
        .map(|&t| {
            let budget = opts.budget.unwrap_or_else(|| attack.default_budget(g, t));
            let plan = attack.run(g, t, budget)?;
            if plan.is_empty() {
                return Ok((plan, None));
            }
            let perturbed = plan.apply(g)?;
            let success = prediction_changed(g, &perturbed, t)?;
            Ok((plan, success.then_some(perturbed)))
        })
        .collect::<Result<_>>()?;

    let clean = AttributeExtractor::new(g);
    let pairs: Vec<Option<(DetectionSample, DetectionSample)>> = outcomes
        .par_iter()
        .map(|(plan, perturbed)| {
            let Some(perturbed) = perturbed else {
                return Ok(None);
            };
            let t = plan.target;
            let clean_sample = DetectionSample {
                attributes: clean.extract(t)?,
                label: CLEAN,
                attack: None,
                target: t,
                dataset: dataset.to_string(),
            };
            let adv_sample = DetectionSample {
                attributes: attribute_vector(perturbed, t)?,
                label: ADVERSARIAL,
                attack: Some(attack),
                target: t,
                dataset: dataset.to_string(),
            };
            Ok(Some((clean_sample, adv_sample)))
        })
        .collect::<Result<_>>()?;

    let samples: Vec<DetectionSample> = pairs.iter().flatten().flat_map(|(c, a)| [c.clone(), a.clone()]).collect();
    let attempts: Vec<AttemptRecord> = outcomes
        .into_iter()
        .map(|(plan, perturbed)| AttemptRecord {
            plan,
            success: perturbed.is_some(),
        })
        .collect();
    let diagnostic = samples.is_empty().then(|| {
        format!(
            "{attack}: none of {} attacked targets on {dataset} changed the surrogate prediction",
            attempts.len()
        )
    });
    if let Some(msg) = &diagnostic {
        log::warn!("{msg}");
    }
    Ok(DetectionDataset {
        dataset: dataset.to_string(),
        attack,
        samples,
        attempts,
        diagnostic,
    })
}

/// `n` distinct node ids drawn uniformly (all nodes when `n >= N`), sorted.
pub fn sample_targets(g: &Graph, n: usize, seed: u64) -> Vec<NodeId> {
    let total = g.node_count();
    if n >= total {
        return (0..total).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = sample(&mut rng, total, n).into_vec();
    picked.sort_unstable();
    picked
}
