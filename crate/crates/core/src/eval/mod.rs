//! Detection and recognition experiments: paired clean/adversarial samples,
//! forest detectors with top-k attribute selection, and their metrics.

pub mod detect;
pub mod metrics;
pub mod recognize;
pub mod report;
pub mod samples;

pub use detect::{
    evaluate_detector, evaluate_detector_with, top_k_sweep, top_k_sweep_with, DetectorConfig, DetectorOutcome,
    Importance, MetricsReport, Scores, SweepRow,
};
pub use metrics::{accuracy, auc, gain, mean_std, precision};
pub use recognize::{recognize_attack, recognize_attack_with, RecognitionReport};
pub use samples::{
    build_detection_dataset, build_detection_dataset_with, sample_targets, DatasetOptions, DetectionDataset,
    DetectionSample, ADVERSARIAL, CLEAN,
};
