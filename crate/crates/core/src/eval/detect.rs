use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::metrics::{accuracy, auc, gain, precision};
use super::samples::{DetectionSample, ADVERSARIAL, CLEAN};
use crate::attributes::{ATTRIBUTE_COUNT, ATTRIBUTE_NAMES};
use crate::error::{Error, Result};
use crate::forest::{train_forest, Dataset, Forest, ForestParams};

/// Minimum samples of each label `evaluate_detector` accepts.
pub const MIN_SAMPLES_PER_LABEL: usize = 10;
pub const TEST_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub k: usize,
    pub split_seed: u64,
    /// The forest seed is overwritten with `split_seed`.
    pub forest: ForestParams,
}

impl DetectorConfig {
    pub fn new(k: usize, split_seed: u64) -> Self {
        DetectorConfig {
            k,
            split_seed,
            forest: ForestParams::default(),
        }
    }

    fn forest_params(&self) -> ForestParams {
        ForestParams {
            seed: self.split_seed,
            ..self.forest
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Importance {
    pub name: String,
    pub importance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub acc: f64,
    pub auc: f64,
    /// Absent when the model predicted no adversarial sample.
    pub precision: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub k: usize,
    pub acc: f64,
    pub auc: f64,
    pub precision: Option<f64>,
    /// Same split, all 17 attributes.
    pub all: Scores,
    /// Percent gain of the all-attribute model over the top-k model.
    pub gain_acc: Option<f64>,
    pub gain_auc: Option<f64>,
    pub gain_precision: Option<f64>,
    /// Training-fold Gini importance of every attribute, in attribute order.
    pub importances: Vec<Importance>,
    pub uniform_importances: bool,
    pub top_k_names: Vec<String>,
    pub train_size: usize,
    pub test_size: usize,
}

#[derive(Debug, Clone)]
pub struct DetectorOutcome {
    pub report: MetricsReport,
    pub all_forest: Forest,
    pub top_forest: Forest,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: usize,
    pub acc: f64,
    pub auc: f64,
}

pub fn evaluate_detector(samples: &[DetectionSample], k: usize, split_seed: u64) -> Result<MetricsReport> {
    Ok(evaluate_detector_with(samples, &DetectorConfig::new(k, split_seed))?.report)
}

/// Splits by target, trains on all attributes, ranks them by importance on
/// the training fold, retrains on the top `k`, and scores both models on the
/// test fold.
pub fn evaluate_detector_with(samples: &[DetectionSample], cfg: &DetectorConfig) -> Result<DetectorOutcome> {
    check_k(cfg.k)?;
    let split = Split::new(samples, cfg.split_seed)?;
    let params = cfg.forest_params();
    let all_forest = train_forest(&split.train, &params)?;
    let all = score(&all_forest, &split.test)?;

    let columns = top_columns(&all_forest, cfg.k);
    let top_forest = train_forest(&split.train.select_features(&columns), &params)?;
    let top = score(&top_forest, &split.test.select_features(&columns))?;

    let relative = |m_all: f64, m_top: f64| gain(m_all, m_top).ok();
    let report = MetricsReport {
        k: cfg.k,
        acc: top.acc,
        auc: top.auc,
        precision: top.precision,
        all,
        gain_acc: relative(all.acc, top.acc),
        gain_auc: relative(all.auc, top.auc),
        gain_precision: all.precision.zip(top.precision).and_then(|(a, t)| relative(a, t)),
        importances: ATTRIBUTE_NAMES
            .iter()
            .zip(&all_forest.importances)
            .map(|(name, &importance)| Importance {
                name: name.to_string(),
                importance,
            })
            .collect(),
        uniform_importances: all_forest.uniform_importances,
        top_k_names: ranked_names(&all_forest, cfg.k),
        train_size: split.train.len(),
        test_size: split.test.len(),
    };
    Ok(DetectorOutcome {
        report,
        all_forest,
        top_forest,
    })
}

/// Test AUC and accuracy for each `k`, all on one split and one ranking.
pub fn top_k_sweep(samples: &[DetectionSample], k_values: &[usize], seed: u64) -> Result<Vec<SweepRow>> {
    top_k_sweep_with(samples, k_values, &DetectorConfig::new(ATTRIBUTE_COUNT, seed))
}

pub fn top_k_sweep_with(samples: &[DetectionSample], k_values: &[usize], cfg: &DetectorConfig) -> Result<Vec<SweepRow>> {
    for &k in k_values {
        check_k(k)?;
    }
    let split = Split::new(samples, cfg.split_seed)?;
    let params = cfg.forest_params();
    let ranking_forest = train_forest(&split.train, &params)?;
    k_values
        .iter()
        .map(|&k| {
            let columns = top_columns(&ranking_forest, k);
            let forest = train_forest(&split.train.select_features(&columns), &params)?;
            let s = score(&forest, &split.test.select_features(&columns))?;
            Ok(SweepRow { k, acc: s.acc, auc: s.auc })
        })
        .collect()
}

fn check_k(k: usize) -> Result<()> {
    if !(1..=ATTRIBUTE_COUNT).contains(&k) {
        return Err(Error::InvalidArgument(format!("k = {k} outside [1, {ATTRIBUTE_COUNT}]")));
    }
    Ok(())
}

/// Indices of the `k` most important attributes, in attribute order so that
/// `k = 17` reproduces the all-attribute dataset column for column.
fn top_columns(forest: &Forest, k: usize) -> Vec<usize> {
    let mut cols = forest.ranking()[..k].to_vec();
    cols.sort_unstable();
    cols
}

fn ranked_names(forest: &Forest, k: usize) -> Vec<String> {
    forest.ranking()[..k]
        .iter()
        .map(|&i| forest.feature_names[i].clone())
        .collect()
}

fn score(forest: &Forest, test: &Dataset) -> Result<Scores> {
    let mut predicted = Vec::with_capacity(test.len());
    let mut adv_proba = Vec::with_capacity(test.len());
    for x in test.features() {
        let proba = forest.predict_proba(x)?;
        adv_proba.push(proba[ADVERSARIAL]);
        predicted.push(forest.predict(x)?);
    }
    let actual = test.targets();
    let positive: Vec<bool> = actual.iter().map(|&t| t == ADVERSARIAL).collect();
    let tp = predicted.iter().zip(actual).filter(|&(&p, &a)| p == ADVERSARIAL && a == ADVERSARIAL).count();
    let fp = predicted.iter().zip(actual).filter(|&(&p, &a)| p == ADVERSARIAL && a == CLEAN).count();
    Ok(Scores {
        acc: accuracy(&predicted, actual),
        auc: auc(&adv_proba, &positive)?,
        precision: precision(tp, fp),
    })
}

pub(crate) fn dataset_of(samples: &[&DetectionSample], targets: Vec<usize>, class_count: usize) -> Result<Dataset> {
    Dataset::new(
        samples.iter().map(|s| s.attributes.values().to_vec()).collect(),
        targets,
        ATTRIBUTE_NAMES.iter().map(|s| s.to_string()).collect(),
        Some(class_count),
    )
}

/// 80/20 split that keeps every (dataset, target) group in one fold.
/// Groups are stratified by the union of `class_bit` over their members;
/// each stratum with at least two groups contributes to both folds.
pub(crate) fn grouped_split(
    samples: &[DetectionSample],
    class_bit: impl Fn(&DetectionSample) -> u64,
    seed: u64,
) -> (Vec<usize>, Vec<usize>) {
    let mut groups: BTreeMap<(&str, usize), Vec<usize>> = BTreeMap::new();
    for (i, s) in samples.iter().enumerate() {
        groups.entry((s.dataset.as_str(), s.target)).or_default().push(i);
    }
    let mut strata: BTreeMap<u64, Vec<Vec<usize>>> = BTreeMap::new();
    for members in groups.into_values() {
        let signature = members.iter().fold(0, |acc, &i| acc | class_bit(&samples[i]));
        strata.entry(signature).or_default().push(members);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for mut stratum in strata.into_values() {
        stratum.shuffle(&mut rng);
        let n_test = ((stratum.len() as f64 * TEST_FRACTION).round() as usize).clamp(1, stratum.len().max(2) - 1);
        for (j, members) in stratum.into_iter().enumerate() {
            let fold = if j < n_test { &mut test } else { &mut train };
            fold.extend(members);
        }
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

struct Split {
    train: Dataset,
    test: Dataset,
}

impl Split {
    fn new(samples: &[DetectionSample], seed: u64) -> Result<Self> {
        for (label, name) in [(CLEAN, "clean"), (ADVERSARIAL, "adversarial")] {
            let n = samples.iter().filter(|s| s.label == label).count();
            if n < MIN_SAMPLES_PER_LABEL {
                return Err(Error::InsufficientSamples(format!(
                    "{n} {name} samples, need at least {MIN_SAMPLES_PER_LABEL}"
                )));
            }
        }
        if let Some(s) = samples.iter().find(|s| s.label > ADVERSARIAL) {
            return Err(Error::InvalidArgument(format!("detection label {} is not 0 or 1", s.label)));
        }

        let (train_idx, test_idx) = grouped_split(samples, |s| 1u64 << s.label, seed);
        let build = |idx: &[usize]| -> Result<Dataset> {
            let rows: Vec<&DetectionSample> = idx.iter().map(|&i| &samples[i]).collect();
            let targets = rows.iter().map(|s| s.label).collect();
            dataset_of(&rows, targets, 2)
        };
        let (train, test) = (build(&train_idx)?, build(&test_idx)?);
        for (fold, name) in [(&train, "training"), (&test, "test")] {
            if !(fold.targets().contains(&CLEAN) && fold.targets().contains(&ADVERSARIAL)) {
                return Err(Error::InsufficientSamples(format!("{name} fold lacks one of the labels")));
            }
        }
        Ok(Split { train, test })
    }
}
