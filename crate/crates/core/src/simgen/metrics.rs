use crate::error::{Error, Result};

fn check(truth: &[usize], predicted: &[usize]) -> Result<()> {
    if truth.is_empty() {
        return Err(Error::InvalidArgument("no predictions to score".into()));
    }
    if truth.len() != predicted.len() {
        return Err(Error::Dimension(format!(
            "{} true labels vs {} predictions",
            truth.len(),
            predicted.len()
        )));
    }
    Ok(())
}

/// Fraction of exact matches.
pub fn accuracy(truth: &[usize], predicted: &[usize]) -> Result<f64> {
    check(truth, predicted)?;
    let hits = truth.iter().zip(predicted).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// Per-class F1 averaged with weights equal to each class's share of `truth`.
/// A class with zero precision and recall has F1 = 0.
pub fn weighted_f1(truth: &[usize], predicted: &[usize]) -> Result<f64> {
    check(truth, predicted)?;
    let k = truth.iter().chain(predicted).max().copied().unwrap_or(0) + 1;
    let mut tp = vec![0usize; k];
    let mut support = vec![0usize; k];
    let mut pred_count = vec![0usize; k];
    for (&t, &p) in truth.iter().zip(predicted) {
        support[t] += 1;
        pred_count[p] += 1;
        if t == p {
            tp[t] += 1;
        }
    }
    let n = truth.len() as f64;
    let mut score = 0.0;
    for j in 0..k {
        if support[j] == 0 {
            continue;
        }
        let precision = if pred_count[j] > 0 { tp[j] as f64 / pred_count[j] as f64 } else { 0.0 };
        let recall = tp[j] as f64 / support[j] as f64;
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        score += support[j] as f64 / n * f1;
    }
    Ok(score)
}
