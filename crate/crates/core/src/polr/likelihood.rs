use crate::error::{Error, Result};
use crate::features::Design;

use super::probs::{check_increasing, log_category_prob};
use super::PolrParams;

/// Log-probabilities are floored at `ln(1e-300)`.
pub const PROB_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLikelihood {
    pub value: f64,
    /// Rows whose probability fell below [`PROB_FLOOR`].
    pub floored: usize,
}

fn check_shapes(params: &PolrParams, design: &Design, n_categories: usize) -> Result<()> {
    if params.coefficients.len() != design.n_cols() {
        return Err(Error::Dimension(format!(
            "{} coefficients for {} design columns",
            params.coefficients.len(),
            design.n_cols()
        )));
    }
    if let Some(y) = design.responses.iter().find(|&&y| y >= n_categories) {
        return Err(Error::Dimension(format!("response {y} outside 0..{}", n_categories - 1)));
    }
    Ok(())
}

pub(crate) fn linear_predictor(row: &[f64], beta: &[f64]) -> f64 {
    row.iter().zip(beta).map(|(x, b)| x * b).sum()
}

/// `sum_t ln P(Y_t = y_t)` over the design rows.
pub fn log_likelihood(params: &PolrParams, design: &Design) -> Result<f64> {
    log_likelihood_with_diagnostics(params, design).map(|l| l.value)
}

pub fn log_likelihood_with_diagnostics(params: &PolrParams, design: &Design) -> Result<LogLikelihood> {
    check_increasing(&params.thresholds)?;
    check_shapes(params, design, params.n_categories())?;
    Ok(loglik_unchecked(&params.thresholds, &params.coefficients, design))
}

pub(crate) fn loglik_unchecked(thresholds: &[f64], beta: &[f64], design: &Design) -> LogLikelihood {
    let floor = PROB_FLOOR.ln();
    let mut value = 0.0;
    let mut floored = 0;
    for (i, &y) in design.responses.iter().enumerate() {
        let eta = linear_predictor(design.row(i), beta);
        let (lp, _, _) = log_category_prob(thresholds, eta, y);
        if lp.is_nan() || lp < floor {
            value += floor;
            floored += 1;
        } else {
            value += lp;
        }
    }
    LogLikelihood { value, floored }
}

/// Map the unconstrained vector `(theta_0, d_1..d_{m-1}, beta)` to ordered thresholds:
/// `theta_j = theta_0 + sum_{k<=j} exp(d_k)`.
pub(crate) fn thresholds_from_free(free: &[f64], m: usize) -> Vec<f64> {
    let mut th = Vec::with_capacity(m);
    let mut acc = free[0];
    th.push(acc);
    for d in &free[1..m] {
        acc += d.exp();
        th.push(acc);
    }
    th
}

/// Inverse of [`thresholds_from_free`]; the thresholds must be strictly increasing.
pub(crate) fn free_from_thresholds(th: &[f64]) -> Vec<f64> {
    let mut free = vec![th[0]];
    free.extend(th.windows(2).map(|w| (w[1] - w[0]).ln()));
    free
}

/// Analytic gradient of the log-likelihood in `(theta, beta)` order.
pub fn log_likelihood_gradient(params: &PolrParams, design: &Design) -> Result<Vec<f64>> {
    check_increasing(&params.thresholds)?;
    check_shapes(params, design, params.n_categories())?;
    let (_, mut g, g_beta) = loglik_and_grad(&params.thresholds, &params.coefficients, design);
    g.extend(g_beta);
    Ok(g)
}

/// Log-likelihood with its threshold and coefficient gradients. Floored rows contribute a constant.
fn loglik_and_grad(th: &[f64], beta: &[f64], design: &Design) -> (f64, Vec<f64>, Vec<f64>) {
    let m = th.len();
    let floor = PROB_FLOOR.ln();
    let mut value = 0.0;
    let mut g_theta = vec![0.0; m];
    let mut g_beta = vec![0.0; design.n_cols()];
    for (i, &y) in design.responses.iter().enumerate() {
        let row = design.row(i);
        let eta = linear_predictor(row, beta);
        let (lp, d_upper, d_lower) = log_category_prob(th, eta, y);
        if !(lp >= floor) {
            value += floor;
            continue;
        }
        value += lp;
        if y < m {
            g_theta[y] += d_upper;
        }
        if y > 0 {
            g_theta[y - 1] += d_lower;
        }
        let d_eta = -(d_upper + d_lower);
        for (g, x) in g_beta.iter_mut().zip(row) {
            *g += d_eta * x;
        }
    }
    (value, g_theta, g_beta)
}

/// Mean negative log-likelihood and its gradient in the unconstrained parameterisation.
pub(crate) fn objective(free: &[f64], m: usize, design: &Design) -> (f64, Vec<f64>) {
    let th = thresholds_from_free(free, m);
    let (value, g_theta, g_beta) = loglik_and_grad(&th, &free[m..], design);
    let n = design.n_rows() as f64;

    // chain rule through the cumulative-exp threshold map
    let mut grad = vec![0.0; m + g_beta.len()];
    grad[0] = g_theta.iter().sum();
    let mut tail = 0.0;
    for l in (1..m).rev() {
        tail += g_theta[l];
        grad[l] = free[l].exp() * tail;
    }
    grad[m..].copy_from_slice(&g_beta);

    for g in &mut grad {
        *g = -*g / n;
    }
    (-value / n, grad)
}
