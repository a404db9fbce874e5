use crate::error::{Error, Result};

/// Area under the ROC curve as the Mann-Whitney statistic: the fraction of
/// (positive, negative) pairs where the positive scores higher, ties counting
/// one half.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::InvalidArgument(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    let positives = labels.iter().filter(|&&l| l).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::InvalidArgument("AUC needs both classes present".into()));
    }
    if let Some(bad) = scores.iter().find(|s| s.is_nan()) {
        return Err(Error::InvalidArgument(format!("score {bad} is not comparable")));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // midranks (1-based) over tie groups, doubled to stay integral
    let mut doubled_rank_sum: u64 = 0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        let doubled_mid = (start + 1 + end) as u64;
        let pos_in_group = order[start..end].iter().filter(|&&i| labels[i]).count() as u64;
        doubled_rank_sum += doubled_mid * pos_in_group;
        start = end;
    }
    let p = positives as u64;
    // 2 * (concordant + ties / 2)
    let doubled_u = doubled_rank_sum - p * (p + 1);
    Ok(doubled_u as f64 / 2.0 / (positives * negatives) as f64)
}

/// `tp / (tp + fp)`; `None` when nothing was predicted positive.
pub fn precision(tp: usize, fp: usize) -> Option<f64> {
    (tp + fp > 0).then(|| tp as f64 / (tp + fp) as f64)
}

/// Relative improvement of the all-attribute model over the top-k model,
/// in percent.
pub fn gain(m_all: f64, m_top: f64) -> Result<f64> {
    if m_top <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "gain needs a positive reference metric, got {m_top}"
        )));
    }
    Ok((m_all - m_top) / m_top * 100.0)
}

pub fn accuracy(predicted: &[usize], actual: &[usize]) -> f64 {
    let hits = predicted.iter().zip(actual).filter(|(p, a)| p == a).count();
    hits as f64 / actual.len() as f64
}

/// Sample mean and standard deviation (n - 1 denominator).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
