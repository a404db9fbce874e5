use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::detect::{dataset_of, grouped_split};
use super::metrics::{auc, mean_std};
use super::samples::DetectionSample;
use crate::attacks::AttackKind;
use crate::error::{Error, Result};
use crate::forest::{train_forest, ForestParams};

pub const REPETITIONS: usize = 10;
/// Fewer samples per attack would leave the test fold empty for it.
pub const MIN_SAMPLES_PER_ATTACK: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecognitionReport {
    /// Class order of the AUC and confusion-matrix axes.
    pub classes: Vec<AttackKind>,
    pub auc_mean: f64,
    pub auc_std: f64,
    /// Macro one-vs-rest AUC per repetition.
    pub auc_runs: Vec<f64>,
    /// One-vs-rest AUC per class, averaged over repetitions.
    pub class_auc: Vec<f64>,
    /// Rows are true classes, columns predictions, summed over repetitions.
    pub confusion: Vec<Vec<usize>>,
}

pub fn recognize_attack(samples: &[DetectionSample], split_seed: u64) -> Result<RecognitionReport> {
    recognize_attack_with(samples, split_seed, &ForestParams::default())
}

/// Multi-class forest over adversarial samples, labelled by attack.
/// Repetition `r` splits and trains with seed `split_seed + r`; samples of
/// one target stay in one fold, as in the detector split.
pub fn recognize_attack_with(
    samples: &[DetectionSample],
    split_seed: u64,
    forest: &ForestParams,
) -> Result<RecognitionReport> {
    let mut by_class: BTreeMap<AttackKind, Vec<&DetectionSample>> = BTreeMap::new();
    for s in samples {
        let Some(attack) = s.attack.filter(|_| s.is_adversarial()) else {
            return Err(Error::InvalidArgument(format!(
                "recognition takes adversarial samples only; target {} of {} is clean",
                s.target, s.dataset
            )));
        };
        by_class.entry(attack).or_default().push(s);
    }
    if by_class.len() < 2 {
        return Err(Error::InsufficientSamples(format!(
            "recognition needs at least 2 attack classes, got {}",
            by_class.len()
        )));
    }
    if let Some((attack, rows)) = by_class.iter().find(|(_, r)| r.len() < MIN_SAMPLES_PER_ATTACK) {
        return Err(Error::InsufficientSamples(format!(
            "{} {attack} samples, need at least {MIN_SAMPLES_PER_ATTACK}",
            rows.len()
        )));
    }
    let classes: Vec<AttackKind> = by_class.keys().copied().collect();
    let k = classes.len();
    let adversarial: Vec<DetectionSample> = by_class.into_values().flatten().cloned().collect();
    let class_of = |s: &DetectionSample| classes.binary_search(&s.attack.expect("checked above")).expect("known class");

    let mut auc_runs = Vec::with_capacity(REPETITIONS);
    let mut class_auc = vec![0.0; k];
    let mut confusion = vec![vec![0usize; k]; k];
    for r in 0..REPETITIONS {
        let seed = split_seed.wrapping_add(r as u64);
        let (train_idx, test_idx) = grouped_split(&adversarial, |s| 1u64 << class_of(s), seed);
        let labelled = |idx: Vec<usize>| -> Vec<(&DetectionSample, usize)> {
            idx.into_iter().map(|i| (&adversarial[i], class_of(&adversarial[i]))).collect()
        };
        let (train, test) = (labelled(train_idx), labelled(test_idx));
        for c in 0..k {
            if !test.iter().any(|&(_, class)| class == c) || !train.iter().any(|&(_, class)| class == c) {
                return Err(Error::InsufficientSamples(format!(
                    "{} samples do not fill both folds",
                    classes[c]
                )));
            }
        }
        let (train_rows, train_y): (Vec<_>, Vec<_>) = train.into_iter().unzip();
        let model = train_forest(
            &dataset_of(&train_rows, train_y, k)?,
            &ForestParams { seed, ..*forest },
        )?;

        let mut proba = Vec::with_capacity(test.len());
        for &(s, class) in &test {
            let p = model.predict_proba(s.attributes.values())?;
            confusion[class][crate::attacks::surrogate::argmax(&p)] += 1;
            proba.push(p);
        }
        let mut macro_auc = 0.0;
        for c in 0..k {
            let scores: Vec<f64> = proba.iter().map(|p| p[c]).collect();
            let positive: Vec<bool> = test.iter().map(|&(_, class)| class == c).collect();
            let a = auc(&scores, &positive)?;
            class_auc[c] += a / REPETITIONS as f64;
            macro_auc += a / k as f64;
        }
        auc_runs.push(macro_auc);
    }
    let (auc_mean, auc_std) = mean_std(&auc_runs);
    Ok(RecognitionReport {
        classes,
        auc_mean,
        auc_std,
        auc_runs,
        class_auc,
        confusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attributes::{AttributeVector, ATTRIBUTE_COUNT};
    use crate::eval::samples::{ADVERSARIAL, CLEAN};

    fn adv(attack: AttackKind, target: usize, v: [f64; ATTRIBUTE_COUNT]) -> DetectionSample {
        DetectionSample {
            attributes: AttributeVector(v),
            label: ADVERSARIAL,
            attack: Some(attack),
            target,
            dataset: "toy".into(),
        }
    }

    #[test]
    fn identical_classes_are_chance() {
        let mut samples = Vec::new();
        for t in 0..20 {
            let v = [t as f64; ATTRIBUTE_COUNT];
            samples.push(adv(AttackKind::Nettack, t, v));
            samples.push(adv(AttackKind::Meta, t, v));
        }
        let r = recognize_attack(&samples, 0).unwrap();
        assert!((r.auc_mean - 0.5).abs() < 1e-12, "{}", r.auc_mean);
    }

    #[test]
    fn separable_classes() {
        let mut samples = Vec::new();
        for t in 0..15 {
            for (i, attack) in AttackKind::ALL.into_iter().enumerate() {
                let mut v = [t as f64; ATTRIBUTE_COUNT];
                v[0] = i as f64 * 100.0;
                samples.push(adv(attack, t, v));
            }
        }
        let r = recognize_attack(&samples, 2).unwrap();
        assert_eq!(r.auc_mean, 1.0);
        assert_eq!(r.auc_std, 0.0);
        assert_eq!(r.auc_runs.len(), REPETITIONS);
        let total: usize = r.confusion.iter().flatten().sum();
        let diagonal: usize = (0..3).map(|i| r.confusion[i][i]).sum();
        assert_eq!(total, diagonal);
        assert_eq!(total, REPETITIONS * 9);
    }

    #[test]
    fn validation() {
        let one: Vec<_> = (0..10)
            .map(|t| adv(AttackKind::Nettack, t, [0.0; ATTRIBUTE_COUNT]))
            .collect();
        assert!(recognize_attack(&one, 0).is_err());
        let mut with_clean = one.clone();
        with_clean.extend((0..10).map(|t| adv(AttackKind::Meta, t, [1.0; ATTRIBUTE_COUNT])));
        assert!(recognize_attack(&with_clean, 0).is_ok());
        with_clean[0].label = CLEAN;
        assert!(recognize_attack(&with_clean, 0).is_err());
    }
}
