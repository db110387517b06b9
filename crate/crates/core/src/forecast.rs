//! One-step-ahead categorical forecasting shared by every model family.

use std::collections::BTreeMap;

use chrono::{Duration, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::baselines::{MarkovModel, MtdModel, ParModel};
use crate::error::{Error, Result};
use crate::polr::PolrModel;
use crate::series::OrdinalSeries;

pub trait OneStepForecaster {
    fn n_categories(&self) -> usize;

    /// Largest lag, in days, the model reads.
    fn max_lag(&self) -> usize;

    /// Conditional distribution of the category on `date`; `lag(p)` returns the code `p` days earlier.
    fn distribution(&self, date: NaiveDate, lag: &dyn Fn(usize) -> Option<usize>) -> Result<Vec<f64>>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub date: NaiveDate,
    pub observed: Option<usize>,
    pub predicted: usize,
    pub probs: Vec<f64>,
}

/// Index of the largest probability; ties go to the lowest category code.
pub fn argmax_lowest(probs: &[f64]) -> usize {
    let mut best = 0;
    for (j, p) in probs.iter().enumerate().skip(1) {
        if *p > probs[best] {
            best = j;
        }
    }
    best
}

/// Forecast the category on `date` using the observed codes in `history` for the lags.
pub fn predict_one_step<M: OneStepForecaster + ?Sized>(
    model: &M,
    history: &OrdinalSeries,
    date: NaiveDate,
) -> Result<Prediction> {
    let lag = |p: usize| history.code_on(date - Duration::days(p as i64));
    let probs = model.distribution(date, &lag)?;
    Ok(Prediction { date, observed: history.code_on(date), predicted: argmax_lowest(&probs), probs })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LagMode {
    /// Lags are the true observed categories (rolling one-step forecasts).
    #[default]
    Observed,
    /// Lags inside the window are the model's own earlier predictions.
    Recursive,
}

/// One forecast for every observed date in `[start, end]`.
pub fn forecast_window<M: OneStepForecaster + ?Sized>(
    model: &M,
    series: &OrdinalSeries,
    start: NaiveDate,
    end: NaiveDate,
    mode: LagMode,
) -> Result<Vec<Prediction>> {
    let lo = series.dates().partition_point(|d| *d < start);
    let hi = series.dates().partition_point(|d| *d <= end);
    if lo >= hi {
        return Err(Error::InvalidArgument(format!(
            "window {start}..{end} contains no observations (series covers {}..{})",
            series.first_date(),
            series.last_date()
        )));
    }
    let mut predicted: BTreeMap<NaiveDate, usize> = BTreeMap::new();
    let mut out = Vec::with_capacity(hi - lo);
    for i in lo..hi {
        let date = series.dates()[i];
        let lag = |p: usize| {
            let d = date - Duration::days(p as i64);
            match mode {
                LagMode::Recursive if d >= start => predicted.get(&d).copied(),
                _ => series.code_on(d),
            }
        };
        let probs = model.distribution(date, &lag)?;
        let pred = argmax_lowest(&probs);
        predicted.insert(date, pred);
        out.push(Prediction { date, observed: Some(series.codes()[i]), predicted: pred, probs });
    }
    Ok(out)
}

/// Any persisted model, tagged by family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum AnyModel {
    Polr(PolrModel),
    Markov(MarkovModel),
    Mtd(MtdModel),
    Par(ParModel),
}

impl AnyModel {
    fn inner(&self) -> &dyn OneStepForecaster {
        match self {
            AnyModel::Polr(m) => m,
            AnyModel::Markov(m) => m,
            AnyModel::Mtd(m) => m,
            AnyModel::Par(m) => m,
        }
    }
}

impl OneStepForecaster for AnyModel {
    fn n_categories(&self) -> usize {
        self.inner().n_categories()
    }

    fn max_lag(&self) -> usize {
        self.inner().max_lag()
    }

    fn distribution(&self, date: NaiveDate, lag: &dyn Fn(usize) -> Option<usize>) -> Result<Vec<f64>> {
        self.inner().distribution(date, lag)
    }
}
