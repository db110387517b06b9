use crate::error::{Error, Result};

use super::PolrParams;

/// Numerically stable logistic function.
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(logistic(x))` without cancellation for large |x|.
pub(crate) fn log_logistic(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// `P(Y <= j)` for `j = 0..m-1` under `logit P(Y <= j) = theta_j - eta`.
pub fn cumulative_probs(params: &PolrParams, eta: f64) -> Result<Vec<f64>> {
    params.check_thresholds()?;
    Ok(params.thresholds.iter().map(|th| logistic(th - eta)).collect())
}

/// `P(Y = j)` for `j = 0..m`.
pub fn category_probs(params: &PolrParams, eta: f64) -> Result<Vec<f64>> {
    params.check_thresholds()?;
    Ok(category_probs_unchecked(&params.thresholds, eta))
}

/// Category probabilities as differences of adjacent cumulative probabilities.
///
/// Each interior difference `F(a) - F(b)` is evaluated as `F(a) F(-b) (1 - e^(b-a))`,
/// which stays accurate when both cumulative probabilities are close to 0 or 1.
pub(crate) fn category_probs_unchecked(thresholds: &[f64], eta: f64) -> Vec<f64> {
    let m = thresholds.len();
    (0..=m)
        .map(|j| {
            let upper = (j < m).then(|| thresholds[j] - eta);
            let lower = (j > 0).then(|| thresholds[j - 1] - eta);
            match (upper, lower) {
                (Some(a), None) => logistic(a),
                (None, Some(b)) => logistic(-b),
                (Some(a), Some(b)) => logistic(a) * logistic(-b) * -(b - a).exp_m1(),
                (None, None) => 1.0,
            }
        })
        .collect()
}

/// `ln P(Y = j)` and its partial derivatives with respect to the upper (`theta_j - eta`)
/// and lower (`theta_{j-1} - eta`) arguments.
pub(crate) fn log_category_prob(thresholds: &[f64], eta: f64, j: usize) -> (f64, f64, f64) {
    let m = thresholds.len();
    let upper = (j < m).then(|| thresholds[j] - eta);
    let lower = (j > 0).then(|| thresholds[j - 1] - eta);
    match (upper, lower) {
        (Some(a), None) => (log_logistic(a), logistic(-a), 0.0),
        (None, Some(b)) => (log_logistic(-b), 0.0, -logistic(b)),
        (Some(a), Some(b)) => {
            let gap = a - b;
            let ln_p = log_logistic(a) + log_logistic(-b) + (-(-gap).exp_m1()).ln();
            let inv = 1.0 / gap.exp_m1();
            (ln_p, logistic(-a) + inv, -logistic(b) - inv)
        }
        (None, None) => (0.0, 0.0, 0.0),
    }
}

pub(crate) fn check_increasing(thresholds: &[f64]) -> Result<()> {
    let ok = thresholds.iter().all(|t| t.is_finite()) && thresholds.windows(2).all(|w| w[0] < w[1]);
    if ok && !thresholds.is_empty() {
        Ok(())
    } else {
        Err(Error::NonIncreasingThresholds(thresholds.to_vec()))
    }
}
