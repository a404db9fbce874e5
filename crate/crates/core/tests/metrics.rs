mod common;

use advgraph::eval::{accuracy, auc, gain, mean_std, precision};
use proptest::prelude::*;

#[test]
fn hand_values() {
    assert_eq!(precision(3, 1), Some(0.75));
    assert_eq!(precision(0, 0), None);
    let g = gain(0.819, 0.811).unwrap();
    assert!((g - 0.986).abs() < 5e-4, "{g}");
    assert_eq!(accuracy(&[0, 1, 1, 0], &[0, 1, 0, 0]), 0.75);
    let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
    assert_eq!((m, s), (2.0, 1.0));
    assert_eq!(auc(&[0.1, 0.4, 0.35, 0.8], &[false, false, true, true]).unwrap(), 0.75);
    assert!(auc(&[0.1, 0.2], &[true, true]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn auc_equals_pairwise_oracle(
        data in proptest::collection::vec((0u8..6, any::<bool>()), 2..80)
    ) {
        let scores: Vec<f64> = data.iter().map(|&(s, _)| s as f64 / 5.0).collect();
        let labels: Vec<bool> = data.iter().map(|&(_, l)| l).collect();
        prop_assume!(labels.iter().any(|&l| l) && labels.iter().any(|&l| !l));
        prop_assert_eq!(auc(&scores, &labels).unwrap(), common::pairwise_auc(&scores, &labels));
    }
}
