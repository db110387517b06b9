use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{build_design, time_index, CovariateSpec};
use crate::forecast::OneStepForecaster;
use crate::series::{CategoryScheme, OrdinalSeries};

use super::fit::{fit, FitOptions, FitReport};
use super::probs::category_probs;

/// A fitted seasonal proportional-odds model, as persisted to JSON.
///
/// `origin` is the date with time index `t = 1`; forecasts continue that index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolrModel {
    pub scheme: CategoryScheme,
    pub spec: CovariateSpec,
    pub origin: NaiveDate,
    pub fit: FitReport,
}

impl PolrModel {
    /// Fit on the whole of `series`, with the origin at its first date.
    pub fn fit(series: &OrdinalSeries, spec: &CovariateSpec, options: &FitOptions) -> Result<Self> {
        let design = build_design(series, spec)?;
        let report = fit(&design, series.n_categories(), options)?;
        Ok(Self {
            scheme: series.scheme().clone(),
            spec: spec.clone(),
            origin: series.first_date(),
            fit: report,
        })
    }

    pub fn feature_row(&self, date: NaiveDate, lag: &dyn Fn(usize) -> Option<usize>) -> Result<Vec<f64>> {
        self.spec.feature_row(time_index(self.origin, date), date, lag)
    }
}

impl OneStepForecaster for PolrModel {
    fn n_categories(&self) -> usize {
        self.scheme.n_categories()
    }

    fn max_lag(&self) -> usize {
        self.spec.max_lag()
    }

    fn distribution(&self, date: NaiveDate, lag: &dyn Fn(usize) -> Option<usize>) -> Result<Vec<f64>> {
        let row = self.feature_row(date, lag)?;
        if row.len() != self.fit.params.coefficients.len() {
            return Err(Error::Dimension(format!(
                "spec yields {} columns but model has {} coefficients",
                row.len(),
                self.fit.params.coefficients.len()
            )));
        }
        category_probs(&self.fit.params, self.fit.params.eta(&row))
    }
}
