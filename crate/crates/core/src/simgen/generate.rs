use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::CovariateSpec;
use crate::polr::{category_probs, PolrParams};
use crate::series::{CategoryScheme, OrdinalSeries};

/// Steps discarded before the kept sample; a whole number of every simulated period.
pub const DEFAULT_BURN_IN: usize = 100;

/// Date of `t = 1` in simulated series.
pub fn sim_origin() -> NaiveDate {
    NaiveDate::from_ymd_opt(2001, 1, 1).expect("valid date")
}

/// A simulated series plus the linear predictor and category distribution used at each kept step.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub series: OrdinalSeries,
    pub etas: Vec<f64>,
    pub probs: Vec<Vec<f64>>,
}

/// Draw a category from `probs` by inverting the cumulative distribution at `u`.
fn draw(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (j, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return j;
        }
    }
    probs.len() - 1
}

/// Sequential simulation of the proportional-odds process with covariates from `spec`.
///
/// Lags before the first step are category 0. Steps run over time indices
/// `1 - burn_in ..= n`; only `t >= 1` is kept, dated consecutively from [`sim_origin`].
pub fn simulate(
    params: &PolrParams,
    spec: &CovariateSpec,
    n: usize,
    seed: u64,
    burn_in: usize,
) -> Result<SimTrace> {
    params.check_thresholds()?;
    if params.coefficients.len() != spec.n_columns() {
        return Err(Error::Dimension(format!(
            "{} coefficients for {} covariates",
            params.coefficients.len(),
            spec.n_columns()
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let origin = sim_origin();
    let total = burn_in + n;
    let mut history: Vec<usize> = Vec::with_capacity(total);
    let mut etas = Vec::with_capacity(n);
    let mut probs_kept = Vec::with_capacity(n);
    for s in 0..total {
        let t = s as i64 + 1 - burn_in as i64;
        let date = origin + chrono::Duration::days(t - 1);
        let lag = |p: usize| Some(if p <= s { history[s - p] } else { 0 });
        let row = spec.feature_row(t, date, lag)?;
        let eta = params.eta(&row);
        let probs = category_probs(params, eta)?;
        let y = draw(&probs, rng.gen::<f64>());
        history.push(y);
        if t >= 1 {
            etas.push(eta);
            probs_kept.push(probs);
        }
    }
    let scheme = CategoryScheme::numbered(params.n_categories())?;
    let series = OrdinalSeries::from_codes(origin, history.split_off(burn_in), scheme)?;
    Ok(SimTrace { series, etas, probs: probs_kept })
}

fn expect_coefficients(params: &PolrParams, k: usize, what: &str) -> Result<()> {
    if params.coefficients.len() != k {
        return Err(Error::Dimension(format!(
            "{what} takes {k} coefficients, got {}",
            params.coefficients.len()
        )));
    }
    Ok(())
}

/// Trigonometric process: sin/cos at periods 100 and 5, |sin|/|cos| at period 100, lag-1 response.
/// Coefficients are `(b11, b21, b12, b22, b13, b23, gamma)`.
pub fn simulate_tsolr(params: &PolrParams, n: usize, seed: u64) -> Result<OrdinalSeries> {
    expect_coefficients(params, 7, "the trigonometric process")?;
    Ok(simulate(params, &CovariateSpec::tsolr_simulation(), n, seed, DEFAULT_BURN_IN)?.series)
}

/// Indicator process on 100-day cycles; `n` must be a multiple of 100.
/// Coefficients are `(b1..b5)` for S1a, S1b, S2, S3 and the lag-1 response.
pub fn simulate_isolr(params: &PolrParams, n: usize, seed: u64) -> Result<OrdinalSeries> {
    expect_coefficients(params, 5, "the indicator process")?;
    if n % 100 != 0 {
        return Err(Error::InvalidArgument(format!("n = {n} is not a multiple of 100")));
    }
    Ok(simulate(params, &CovariateSpec::isolr_simulation(), n, seed, DEFAULT_BURN_IN)?.series)
}
