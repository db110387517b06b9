use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::Design;

use super::hessian::{covariance_from_hessian, numerical_hessian};
use super::likelihood::{free_from_thresholds, loglik_unchecked, objective, thresholds_from_free};
use super::optimize::{minimize, BfgsOptions};
use super::PolrParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitOptions {
    /// Gradient max-norm tolerance on the per-observation log-likelihood.
    pub tol: f64,
    pub max_iter: usize,
    /// Compute the numerical Hessian, covariance and standard errors.
    pub std_errors: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { tol: 1e-6, max_iter: 500, std_errors: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    /// `theta0..`, then the design column names.
    pub parameter_names: Vec<String>,
    pub params: PolrParams,
    pub std_errors: Option<Vec<f64>>,
    pub vcov: Option<Vec<Vec<f64>>>,
    pub log_likelihood: f64,
    pub converged: bool,
    pub iterations: usize,
    pub gradient_max_norm: f64,
    pub n_obs: usize,
    pub category_counts: Vec<usize>,
    pub floored_probabilities: usize,
    pub diagnostics: Vec<String>,
}

impl FitReport {
    /// Estimates in `parameter_names` order: thresholds then coefficients.
    pub fn estimates(&self) -> Vec<f64> {
        self.params.flatten()
    }
}

/// Names of design columns that are linearly dependent on the thresholds' implicit
/// intercept and the preceding columns.
pub fn collinear_columns(design: &Design) -> Vec<String> {
    let n = design.n_rows();
    let mut basis: Vec<Vec<f64>> = vec![vec![1.0 / (n as f64).sqrt(); n]];
    let mut dependent = Vec::new();
    for j in 0..design.n_cols() {
        let col = design.column(j);
        let norm0 = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut r = col;
        for _ in 0..2 {
            for q in &basis {
                let c: f64 = q.iter().zip(&r).map(|(a, b)| a * b).sum();
                r.iter_mut().zip(q).for_each(|(ri, qi)| *ri -= c * qi);
            }
        }
        let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm0 == 0.0 || norm <= 1e-9 * norm0 {
            dependent.push(design.columns[j].clone());
        } else {
            r.iter_mut().for_each(|v| *v /= norm);
            basis.push(r);
        }
    }
    dependent
}

/// Empirical cumulative logits with half-count smoothing, so every threshold is finite.
fn initial_thresholds(counts: &[usize]) -> Vec<f64> {
    let k = counts.len();
    let total = counts.iter().sum::<usize>() as f64 + 0.5 * k as f64;
    let mut acc = 0.0;
    counts[..k - 1]
        .iter()
        .map(|&c| {
            acc += c as f64 + 0.5;
            let p = acc / total;
            (p / (1.0 - p)).ln()
        })
        .collect()
}

/// Maximum-likelihood fit of the proportional-odds model to `design`.
///
/// Thresholds are optimised as `theta_0` plus log-increments, which keeps them ordered.
/// Standard errors come from the numerical Hessian of the log-likelihood in the
/// original `(theta, beta)` coordinates at the back-transformed optimum.
pub fn fit(design: &Design, n_categories: usize, options: &FitOptions) -> Result<FitReport> {
    if n_categories < 2 {
        return Err(Error::TooFewCategories(n_categories));
    }
    let mut counts = vec![0usize; n_categories];
    for &y in &design.responses {
        if y >= n_categories {
            return Err(Error::Dimension(format!("response {y} outside 0..{}", n_categories - 1)));
        }
        counts[y] += 1;
    }
    let distinct = counts.iter().filter(|&&c| c > 0).count();
    if distinct < 2 {
        return Err(Error::TooFewCategories(distinct));
    }
    let dependent = collinear_columns(design);
    if !dependent.is_empty() {
        return Err(Error::RankDeficient(dependent));
    }

    let mut diagnostics = Vec::new();
    for (j, c) in counts.iter().enumerate() {
        if *c == 0 {
            diagnostics.push(format!("category {j} never observed in training data"));
        }
    }

    let m = n_categories - 1;
    let p = design.n_cols();
    let mut start = free_from_thresholds(&initial_thresholds(&counts));
    start.extend(std::iter::repeat(0.0).take(p));

    let result = minimize(
        |z| objective(z, m, design),
        start,
        BfgsOptions { grad_tol: options.tol, max_iter: options.max_iter },
    );
    if !result.converged {
        diagnostics.push(format!(
            "optimizer stopped after {} iterations with gradient max-norm {:.3e}",
            result.iterations,
            result.grad.iter().fold(0.0f64, |a, g| a.max(g.abs()))
        ));
    }

    let thresholds = thresholds_from_free(&result.x, m);
    let coefficients = result.x[m..].to_vec();
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        diagnostics.push("adjacent thresholds numerically tied".into());
    }
    let ll = loglik_unchecked(&thresholds, &coefficients, design);
    if ll.floored > 0 {
        diagnostics.push(format!("{} probabilities floored at 1e-300", ll.floored));
    }

    let mut names: Vec<String> = (0..m).map(|j| format!("theta{j}")).collect();
    names.extend(design.columns.iter().cloned());
    let params = PolrParams { thresholds, coefficients };

    let (vcov, std_errors) = if options.std_errors {
        let point = params.flatten();
        let h = numerical_hessian(
            |v| loglik_unchecked(&v[..m], &v[m..], design).value,
            &point,
        );
        match covariance_from_hessian(&h) {
            Ok(cov) => {
                let se = (0..cov.len()).map(|i| cov[i][i].sqrt()).collect();
                (Some(cov), Some(se))
            }
            Err(msg) => {
                diagnostics.push(format!("standard errors unavailable: {msg}"));
                (None, None)
            }
        }
    } else {
        (None, None)
    };

    Ok(FitReport {
        parameter_names: names,
        params,
        std_errors,
        vcov,
        log_likelihood: ll.value,
        converged: result.converged,
        iterations: result.iterations,
        gradient_max_norm: result.grad.iter().fold(0.0, |a, g| a.max(g.abs())),
        n_obs: design.n_rows(),
        category_counts: counts,
        floored_probabilities: ll.floored,
        diagnostics,
    })
}
