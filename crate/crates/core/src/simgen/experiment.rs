use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{build_design, CovariateSpec};
use crate::forecast::{forecast_window, LagMode};
use crate::polr::{fit, FitOptions, PolrModel, PolrParams};

use super::generate::{simulate, DEFAULT_BURN_IN};
use super::metrics::{accuracy, weighted_f1};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Process {
    /// Sin/cos seasonal terms at periods (100, 5) plus |sin|/|cos| at 100 and the lag-1 response.
    Trigonometric,
    /// Block indicators on 100-day cycles plus the lag-1 response.
    Indicator,
}

impl Process {
    pub fn spec(self) -> CovariateSpec {
        match self {
            Process::Trigonometric => CovariateSpec::tsolr_simulation(),
            Process::Indicator => CovariateSpec::isolr_simulation(),
        }
    }
}

/// Simulation settings used by the experiment suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Three categories, trigonometric process.
    TrigThree,
    /// Four categories, trigonometric process.
    TrigFour,
    /// Three categories, indicator process.
    IndicatorThree,
    /// Four categories, indicator process.
    IndicatorFour,
}

impl Preset {
    pub fn process(self) -> Process {
        match self {
            Preset::TrigThree | Preset::TrigFour => Process::Trigonometric,
            Preset::IndicatorThree | Preset::IndicatorFour => Process::Indicator,
        }
    }

    pub fn truth(self) -> PolrParams {
        let (th, beta): (&[f64], &[f64]) = match self {
            Preset::TrigThree => (&[-0.84, 0.84], &[0.0, 2.0, 0.0, 0.7, 0.0, 0.2, 1.9]),
            Preset::TrigFour => (&[-1.1, 0.0, 1.1], &[0.6, -1.1, 1.4, -0.8, -0.1, -0.4, -0.3]),
            Preset::IndicatorThree => (&[-0.8, 0.78], &[0.2, -1.4, 0.3, 0.9, 1.1]),
            Preset::IndicatorFour => (&[-0.9, 0.02, 1.2], &[-0.4, -1.3, 0.5, 0.7, 1.2]),
        };
        PolrParams::new(th.to_vec(), beta.to_vec()).expect("valid preset")
    }

    pub fn config(self, n: usize, replicates: usize, seed: u64) -> SimConfig {
        SimConfig {
            process: self.process(),
            truth: self.truth(),
            n,
            replicates,
            seed,
            train_fraction: 0.8,
            burn_in: DEFAULT_BURN_IN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub process: Process,
    pub truth: PolrParams,
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
}

fn default_train_fraction() -> f64 {
    0.8
}

fn default_burn_in() -> usize {
    DEFAULT_BURN_IN
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidArgument("replicates must be at least 1".into()));
        }
        if self.process == Process::Indicator && self.n % 100 != 0 {
            return Err(Error::InvalidArgument(format!("n = {} is not a multiple of 100", self.n)));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::InvalidArgument("train fraction must lie in (0, 1)".into()));
        }
        if self.truth.coefficients.len() != self.process.spec().n_columns() {
            return Err(Error::Dimension(format!(
                "{:?} takes {} coefficients",
                self.process,
                self.process.spec().n_columns()
            )));
        }
        Ok(())
    }

    /// Seed of replicate `r`, derived from the master seed.
    pub fn replicate_seed(&self, r: usize) -> u64 {
        splitmix64(self.seed ^ splitmix64(r as u64))
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Pairwise summation over a fixed order, so the result does not depend on thread scheduling.
fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

fn mean(v: &[f64]) -> f64 {
    pairwise_sum(v) / v.len() as f64
}

fn sample_sd(v: &[f64]) -> Option<f64> {
    if v.len() < 2 {
        return None;
    }
    let m = mean(v);
    let dev: Vec<f64> = v.iter().map(|x| (x - m).powi(2)).collect();
    Some((pairwise_sum(&dev) / (v.len() - 1) as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyResult {
    pub n: usize,
    pub replicates: usize,
    pub parameter_names: Vec<String>,
    pub truth: Vec<f64>,
    pub mean: Vec<f64>,
    /// Empirical standard deviation across replicates; absent with fewer than two usable fits.
    pub sd: Option<Vec<f64>>,
    pub used: usize,
    pub failed: usize,
}

/// Repeated simulate-then-fit runs of the trigonometric process.
pub fn consistency_experiment(config: &SimConfig) -> Result<ConsistencyResult> {
    config.validate()?;
    if config.process != Process::Trigonometric {
        return Err(Error::InvalidArgument("consistency runs use the trigonometric process".into()));
    }
    let spec = config.process.spec();
    let k = config.truth.n_categories();
    let options = FitOptions { std_errors: false, ..FitOptions::default() };
    let estimates: Vec<Option<Vec<f64>>> = (0..config.replicates)
        .into_par_iter()
        .map(|r| {
            let trace = simulate(&config.truth, &spec, config.n, config.replicate_seed(r), config.burn_in).ok()?;
            let design = build_design(&trace.series, &spec).ok()?;
            let report = fit(&design, k, &options).ok()?;
            report.converged.then(|| report.estimates())
        })
        .collect();

    let used: Vec<Vec<f64>> = estimates.iter().flatten().cloned().collect();
    if used.is_empty() {
        return Err(Error::InvalidArgument("no replicate produced a converged fit".into()));
    }
    let n_par = used[0].len();
    let column = |j: usize| used.iter().map(|e| e[j]).collect::<Vec<_>>();
    let mean_v = (0..n_par).map(|j| mean(&column(j))).collect();
    let sd = (0..n_par).map(|j| sample_sd(&column(j))).collect::<Option<Vec<_>>>();

    let mut names: Vec<String> = (0..k - 1).map(|j| format!("theta{j}")).collect();
    names.extend(spec.column_names());
    Ok(ConsistencyResult {
        n: config.n,
        replicates: config.replicates,
        parameter_names: names,
        truth: config.truth.flatten(),
        mean: mean_v,
        sd,
        used: used.len(),
        failed: config.replicates - used.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelScore {
    pub model: String,
    pub mean_accuracy: f64,
    pub mean_weighted_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastingResult {
    pub n: usize,
    pub replicates: usize,
    pub scores: Vec<ModelScore>,
    pub used: usize,
    pub failed: usize,
}

impl ForecastingResult {
    pub fn score(&self, model: &str) -> Option<&ModelScore> {
        self.scores.iter().find(|s| s.model == model)
    }
}

/// Simulate the indicator process, fit both seasonal forms on the leading share of each
/// replicate, and score rolling one-step forecasts (observed lags) on the rest.
pub fn forecasting_experiment(config: &SimConfig) -> Result<ForecastingResult> {
    config.validate()?;
    if config.process != Process::Indicator {
        return Err(Error::InvalidArgument("forecasting runs use the indicator process".into()));
    }
    let models = [("ISOLR", CovariateSpec::isolr_simulation()), ("TSOLR", CovariateSpec::tsolr_simulation())];
    let options = FitOptions { std_errors: false, ..FitOptions::default() };
    let n_train = (config.train_fraction * config.n as f64).round() as usize;
    let gen_spec = config.process.spec();

    let per_rep: Vec<Option<Vec<(f64, f64)>>> = (0..config.replicates)
        .into_par_iter()
        .map(|r| {
            let trace = simulate(&config.truth, &gen_spec, config.n, config.replicate_seed(r), config.burn_in).ok()?;
            let (train, test) = trace.series.split_at(n_train).ok()?;
            models
                .iter()
                .map(|(_, spec)| {
                    let model = PolrModel::fit(&train, spec, &options).ok()?;
                    if !model.fit.converged {
                        return None;
                    }
                    let preds = forecast_window(
                        &model,
                        &trace.series,
                        test.first_date(),
                        test.last_date(),
                        LagMode::Observed,
                    )
                    .ok()?;
                    let truth: Vec<usize> = preds.iter().filter_map(|p| p.observed).collect();
                    let guess: Vec<usize> = preds.iter().map(|p| p.predicted).collect();
                    Some((accuracy(&truth, &guess).ok()?, weighted_f1(&truth, &guess).ok()?))
                })
                .collect()
        })
        .collect();

    let used: Vec<&Vec<(f64, f64)>> = per_rep.iter().flatten().collect();
    if used.is_empty() {
        return Err(Error::InvalidArgument("no replicate produced converged fits".into()));
    }
    let scores = models
        .iter()
        .enumerate()
        .map(|(i, (name, _))| {
            let acc: Vec<f64> = used.iter().map(|r| r[i].0).collect();
            let f1: Vec<f64> = used.iter().map(|r| r[i].1).collect();
            ModelScore { model: name.to_string(), mean_accuracy: mean(&acc), mean_weighted_f1: mean(&f1) }
        })
        .collect();
    Ok(ForecastingResult {
        n: config.n,
        replicates: config.replicates,
        scores,
        used: used.len(),
        failed: config.replicates - used.len(),
    })
}

/// Parameters down the side, one `mean (sd)` column per sample size.
pub fn write_consistency_table<W: Write>(results: &[ConsistencyResult], out: W) -> Result<()> {
    let Some(first) = results.first() else {
        return Err(Error::InvalidArgument("no results to tabulate".into()));
    };
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["parameter".to_string(), "truth".to_string()];
    header.extend(results.iter().map(|r| format!("n={}", r.n)));
    w.write_record(&header)?;
    for (j, name) in first.parameter_names.iter().enumerate() {
        let mut rec = vec![name.clone(), format!("{:.2}", first.truth[j])];
        for r in results {
            let cell = match &r.sd {
                Some(sd) => format!("{:.2} ({:.2})", r.mean[j], sd[j]),
                None => format!("{:.2}", r.mean[j]),
            };
            rec.push(cell);
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per sample size: accuracy and weighted F1 (percent) per model.
pub fn write_forecasting_table<W: Write>(results: &[ForecastingResult], out: W) -> Result<()> {
    let Some(first) = results.first() else {
        return Err(Error::InvalidArgument("no results to tabulate".into()));
    };
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["n".to_string()];
    for s in &first.scores {
        header.push(format!("{} accuracy", s.model));
        header.push(format!("{} weighted_f1", s.model));
    }
    w.write_record(&header)?;
    for r in results {
        let mut rec = vec![r.n.to_string()];
        for s in &r.scores {
            rec.push(format!("{:.2}", 100.0 * s.mean_accuracy));
            rec.push(format!("{:.2}", 100.0 * s.mean_weighted_f1));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
