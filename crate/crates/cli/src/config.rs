use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chrono::NaiveDate;
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use tsolr::simgen::Preset;
use tsolr::{CalendarConfig, CategoryScheme, CovariateSpec, FitOptions, LagMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Tsolr,
    Isolr,
    Markov,
    Mtd,
    Par,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Consistency,
    Forecasting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub preset: Preset,
    pub sizes: Vec<usize>,
    pub replicates: usize,
    #[serde(default)]
    pub truth: Option<Vec<f64>>,
}

/// One run's settings. Every field is optional in the file; command-line flags win.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Series as CSV (`date,aqi` or `date,category`) or as the JSON written by `ingest`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<CategoryScheme>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelKind>,
    /// Order of the Markov, MTD or PAR baseline.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    /// Fitted model JSON for `forecast`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_file: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calendar: Option<CalendarConfig>,
    /// Replaces the default covariates of `tsolr` / `isolr`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub covariates: Option<CovariateSpec>,
    pub fit: FitOptions,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_start: Option<NaiveDate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_end: Option<NaiveDate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_start: Option<NaiveDate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_end: Option<NaiveDate>,
    pub lag_mode: LagMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_lag: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentConfig>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        // relative paths in a config file are relative to the file
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.series, &mut cfg.model_file].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn scheme(&self) -> CategoryScheme {
        self.scheme.clone().unwrap_or_else(CategoryScheme::national_aqi)
    }

    pub fn calendar(&self) -> CalendarConfig {
        self.calendar.clone().unwrap_or_default()
    }

    pub fn require_model(&self) -> Result<ModelKind> {
        match self.model {
            Some(m) => Ok(m),
            None => bail!("no model given; pass --model or set \"model\" in the config"),
        }
    }

    pub fn require_series(&self) -> Result<&Path> {
        match &self.series {
            Some(p) => Ok(p),
            None => bail!("no series given; pass --series or set \"series\" in the config"),
        }
    }

    pub fn covariates_for(&self, kind: ModelKind) -> Result<CovariateSpec> {
        if let Some(spec) = &self.covariates {
            spec.validate()?;
            return Ok(spec.clone());
        }
        Ok(match kind {
            ModelKind::Tsolr => CovariateSpec::tsolr_daily(),
            ModelKind::Isolr => CovariateSpec::isolr_daily(self.calendar())?,
            other => bail!("{other:?} has no covariates"),
        })
    }

    /// Reject combinations that no command can use, before any work starts.
    pub fn validate(&self) -> Result<()> {
        if let (Some(a), Some(b)) = (self.train_start, self.train_end) {
            if a > b {
                bail!("train_start {a} is after train_end {b}");
            }
        }
        if let (Some(a), Some(b)) = (self.test_start, self.test_end) {
            if a > b {
                bail!("test_start {a} is after test_end {b}");
            }
        }
        if self.order == Some(0) {
            bail!("order must be at least 1");
        }
        if let Some(spec) = &self.covariates {
            spec.validate()?;
        }
        if let Some(cal) = &self.calendar {
            CovariateSpec::new(Vec::new(), cal.clone())?;
        }
        if let Some(e) = &self.experiment {
            if e.sizes.is_empty() {
                bail!("experiment.sizes is empty");
            }
            if e.replicates == 0 {
                bail!("experiment.replicates must be at least 1");
            }
        }
        Ok(())
    }
}
