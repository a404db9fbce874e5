//! CSV emitters for plot data and metric tables.

use std::io::Write;

use super::detect::{MetricsReport, SweepRow};
use super::samples::{DetectionSample, ADVERSARIAL};
use crate::attributes::{AttributeVector, ATTRIBUTE_COUNT, ATTRIBUTE_NAMES};
use crate::error::Result;

pub const HISTOGRAM_BINS: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramRow {
    pub attribute: &'static str,
    pub label: &'static str,
    pub bin: usize,
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

pub fn label_name(label: usize) -> &'static str {
    if label == ADVERSARIAL {
        "adversarial"
    } else {
        "clean"
    }
}

/// Per attribute and label, counts over equal-width bins spanning the range
/// pooled across both labels. A constant attribute puts everything in bin 0.
pub fn histograms(samples: &[DetectionSample], bins: usize) -> Vec<HistogramRow> {
    let mut rows = Vec::new();
    if samples.is_empty() || bins == 0 {
        return rows;
    }
    for (a, &attribute) in ATTRIBUTE_NAMES.iter().enumerate() {
        let values = || samples.iter().map(|s| s.attributes.0[a]);
        let lo = values().fold(f64::INFINITY, f64::min);
        let hi = values().fold(f64::NEG_INFINITY, f64::max);
        let width = (hi - lo) / bins as f64;
        for label in [0, ADVERSARIAL] {
            let mut counts = vec![0usize; bins];
            for s in samples.iter().filter(|s| s.label == label) {
                let x = s.attributes.0[a];
                let bin = if width > 0.0 {
                    (((x - lo) / width) as usize).min(bins - 1)
                } else {
                    0
                };
                counts[bin] += 1;
            }
            for (bin, count) in counts.into_iter().enumerate() {
                let upper = if bin + 1 == bins { hi } else { lo + width * (bin + 1) as f64 };
                rows.push(HistogramRow {
                    attribute,
                    label: label_name(label),
                    bin,
                    lower: lo + width * bin as f64,
                    upper,
                    count,
                });
            }
        }
    }
    rows
}

pub fn write_histogram_csv<W: Write>(out: W, rows: &[HistogramRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["attribute", "label", "bin", "lower", "upper", "count"])?;
    for r in rows {
        w.write_record([
            r.attribute.to_string(),
            r.label.to_string(),
            r.bin.to_string(),
            r.lower.to_string(),
            r.upper.to_string(),
            r.count.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_importance_csv<W: Write>(out: W, report: &MetricsReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["attribute", "importance"])?;
    for imp in &report.importances {
        w.write_record([imp.name.clone(), imp.importance.to_string()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub const METRICS_HEADER: [&str; 12] = [
    "dataset",
    "attack",
    "k",
    "acc",
    "auc",
    "precision",
    "acc_all",
    "auc_all",
    "precision_all",
    "gain_acc",
    "gain_auc",
    "gain_precision",
];

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// One header line plus one row per (dataset, attack, report).
pub fn write_metrics_csv<W: Write>(out: W, rows: &[(&str, &str, &MetricsReport)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(METRICS_HEADER)?;
    for (dataset, attack, r) in rows {
        w.write_record([
            dataset.to_string(),
            attack.to_string(),
            r.k.to_string(),
            r.acc.to_string(),
            r.auc.to_string(),
            opt(r.precision),
            r.all.acc.to_string(),
            r.all.auc.to_string(),
            opt(r.all.precision),
            opt(r.gain_acc),
            opt(r.gain_auc),
            opt(r.gain_precision),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "acc", "auc"])?;
    for r in rows {
        w.write_record([r.k.to_string(), r.acc.to_string(), r.auc.to_string()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// `node_id` followed by the 17 attribute columns.
pub fn write_attribute_csv<W: Write>(out: W, rows: &[(String, AttributeVector)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["node_id"];
    header.extend(ATTRIBUTE_NAMES);
    w.write_record(&header)?;
    for (id, v) in rows {
        let mut record = Vec::with_capacity(ATTRIBUTE_COUNT + 1);
        record.push(id.clone());
        record.extend(v.values().iter().map(f64::to_string));
        w.write_record(&record)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Detection samples with their label and attack, one row each.
pub fn write_samples_csv<W: Write>(out: W, samples: &[DetectionSample]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["dataset", "target", "label", "attack"];
    header.extend(ATTRIBUTE_NAMES);
    w.write_record(&header)?;
    for s in samples {
        let mut record = vec![
            s.dataset.clone(),
            s.target.to_string(),
            label_name(s.label).to_string(),
            s.attack.map(|a| a.to_string()).unwrap_or_default(),
        ];
        record.extend(s.attributes.values().iter().map(f64::to_string));
        w.write_record(&record)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
