//! Proportional-odds cumulative logit model: `logit P(Y_t <= j) = theta_j - eta_t`.
//!
//! This is the shared engine behind both seasonal variants; the covariates in
//! `eta_t` come from a [`CovariateSpec`](crate::features::CovariateSpec).

mod fit;
mod hessian;
mod likelihood;
mod model;
mod optimize;
mod probs;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fit::{collinear_columns, fit, FitOptions, FitReport};
pub use hessian::{covariance_from_hessian, numerical_hessian};
pub use likelihood::{
    log_likelihood, log_likelihood_gradient, log_likelihood_with_diagnostics, LogLikelihood, PROB_FLOOR,
};
pub use model::PolrModel;
pub use optimize::{minimize, BfgsOptions, BfgsResult};
pub use probs::{category_probs, cumulative_probs, logistic};

/// Ordered thresholds and covariate coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolrParams {
    pub thresholds: Vec<f64>,
    pub coefficients: Vec<f64>,
}

impl PolrParams {
    pub fn new(thresholds: Vec<f64>, coefficients: Vec<f64>) -> Result<Self> {
        probs::check_increasing(&thresholds)?;
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("coefficients must be finite".into()));
        }
        Ok(Self { thresholds, coefficients })
    }

    /// Split a flat `(theta.., beta..)` vector for a model with `n_categories` classes.
    pub fn from_flat(values: &[f64], n_categories: usize) -> Result<Self> {
        if n_categories < 2 || values.len() < n_categories - 1 {
            return Err(Error::Dimension(format!(
                "{} values cannot hold {} thresholds",
                values.len(),
                n_categories.saturating_sub(1)
            )));
        }
        let (th, beta) = values.split_at(n_categories - 1);
        Self::new(th.to_vec(), beta.to_vec())
    }

    pub fn n_categories(&self) -> usize {
        self.thresholds.len() + 1
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut v = self.thresholds.clone();
        v.extend_from_slice(&self.coefficients);
        v
    }

    pub fn eta(&self, row: &[f64]) -> f64 {
        likelihood::linear_predictor(row, &self.coefficients)
    }

    pub(crate) fn check_thresholds(&self) -> Result<()> {
        probs::check_increasing(&self.thresholds)
    }
}
