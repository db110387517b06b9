//! Ordinal time series with multiple seasonalities.
//!
//! Proportional-odds logistic regression with trigonometric (TSOLR) or
//! indicator (ISOLR) seasonal covariates, classical categorical baselines
//! (Markov, MTD, PAR), lag-wise auto-association measures, and simulation
//! harnesses for parameter-recovery and forecasting experiments.

pub mod association;
pub mod baselines;
pub mod error;
pub mod features;
pub mod forecast;
pub mod ingest;
pub mod polr;
pub mod series;
pub mod simgen;

pub use error::{Error, Result};
pub use features::{CalendarConfig, CovariateSpec, Design};
pub use forecast::{AnyModel, LagMode, OneStepForecaster, Prediction};
pub use polr::{FitOptions, FitReport, PolrModel, PolrParams};
pub use series::{CategoryScheme, OrdinalSeries};
