//! Classical categorical baselines: order-p Markov chain, MTD(p) and PAR(p).
//!
//! All three are fitted on lag windows whose dates are consecutive calendar days,
//! so a gap in the series never contributes a fabricated transition.

use std::collections::BTreeMap;

use chrono::{Duration, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forecast::{argmax_lowest, OneStepForecaster};
use crate::series::{frequency_distribution, OrdinalSeries};

/// `(lags, current)` with `lags[k - 1] = Y_{t-k}`.
fn lag_windows(series: &OrdinalSeries, p: usize) -> Vec<(Vec<usize>, usize)> {
    let mut out = Vec::new();
    for (&date, &y) in series.dates().iter().zip(series.codes()) {
        let lags: Option<Vec<usize>> = (1..=p)
            .map(|k| series.code_on(date - Duration::days(k as i64)))
            .collect();
        if let Some(lags) = lags {
            out.push((lags, y));
        }
    }
    out
}

fn check_order(series: &OrdinalSeries, p: usize) -> Result<()> {
    if p < 1 {
        return Err(Error::InvalidArgument("order must be at least 1".into()));
    }
    if series.len() <= p {
        return Err(Error::LagTooLarge { lag: p, len: series.len() });
    }
    Ok(())
}

fn lags_for(p: usize, lag: &dyn Fn(usize) -> Option<usize>) -> Result<Vec<usize>> {
    (1..=p)
        .map(|k| lag(k).ok_or_else(|| Error::InsufficientHistory(format!("lag {k} unavailable"))))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovRow {
    /// `(Y_{t-1}, .., Y_{t-p})`
    pub state: Vec<usize>,
    pub count: usize,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovModel {
    pub order: usize,
    pub n_categories: usize,
    /// Fallback for states never seen in training.
    pub marginal: Vec<f64>,
    /// Observed states only, sorted by state.
    pub rows: Vec<MarkovRow>,
}

pub fn fit_markov(series: &OrdinalSeries, p: usize) -> Result<MarkovModel> {
    check_order(series, p)?;
    let k = series.n_categories();
    let mut rows: Vec<MarkovRow> = Vec::new();
    let mut windows = lag_windows(series, p);
    windows.sort();
    for (state, y) in windows {
        match rows.last_mut() {
            Some(row) if row.state == state => {
                row.count += 1;
                row.probs[y] += 1.0;
            }
            _ => {
                let mut probs = vec![0.0; k];
                probs[y] = 1.0;
                rows.push(MarkovRow { state, count: 1, probs });
            }
        }
    }
    for row in &mut rows {
        let n = row.count as f64;
        row.probs.iter_mut().for_each(|v| *v /= n);
    }
    Ok(MarkovModel {
        order: p,
        n_categories: k,
        marginal: frequency_distribution(series).proportions,
        rows,
    })
}

impl MarkovModel {
    /// Free parameters actually stored: `m` per observed state.
    pub fn free_parameters(&self) -> usize {
        self.rows.len() * (self.n_categories - 1)
    }

    /// `m (m+1)^p` for a fully populated chain.
    pub fn max_free_parameters(&self) -> usize {
        (self.n_categories - 1) * self.n_categories.pow(self.order as u32)
    }

    pub fn row(&self, state: &[usize]) -> Option<&MarkovRow> {
        self.rows
            .binary_search_by(|r| r.state.as_slice().cmp(state))
            .ok()
            .map(|i| &self.rows[i])
    }

    /// `lags[0]` is the most recent category.
    pub fn distribution_from_lags(&self, lags: &[usize]) -> Vec<f64> {
        self.row(&lags[..self.order])
            .map_or_else(|| self.marginal.clone(), |r| r.probs.clone())
    }
}

impl OneStepForecaster for MarkovModel {
    fn n_categories(&self) -> usize {
        self.n_categories
    }

    fn max_lag(&self) -> usize {
        self.order
    }

    fn distribution(&self, _: NaiveDate, lag: &dyn Fn(usize) -> Option<usize>) -> Result<Vec<f64>> {
        Ok(self.distribution_from_lags(&lags_for(self.order, lag)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MtdModel {
    pub order: usize,
    pub n_categories: usize,
    /// Mixture weight of each lag, on the simplex.
    pub lambdas: Vec<f64>,
    /// Shared one-step transition matrix; rows without support hold the marginal.
    pub transition: Vec<Vec<f64>>,
    pub marginal: Vec<f64>,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MtdOptions {
    /// Stop when the mean log-likelihood improves by less than this.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for MtdOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_sweeps: 1000 }
    }
}

pub fn fit_mtd(series: &OrdinalSeries, p: usize) -> Result<MtdModel> {
    fit_mtd_with(series, p, MtdOptions::default())
}

/// MTD fit by alternating closed-form updates: lag responsibilities give the new
/// mixture weights (their means) and the new transition rows (weighted counts).
/// Each sweep is an EM step, so the likelihood never decreases.
pub fn fit_mtd_with(series: &OrdinalSeries, p: usize, opts: MtdOptions) -> Result<MtdModel> {
    check_order(series, p)?;
    let k = series.n_categories();
    let marginal = frequency_distribution(series).proportions;
    let windows = lag_windows(series, p);
    if windows.is_empty() {
        return Err(Error::InsufficientHistory(format!("no gap-free windows of length {}", p + 1)));
    }

    // start from the lag-1 empirical transition matrix
    let one_step = lag_windows(series, 1);
    let mut transition = normalise_rows(
        {
            let mut c = vec![vec![0.0; k]; k];
            for (lags, y) in &one_step {
                c[lags[0]][*y] += 1.0;
            }
            c
        },
        &marginal,
    );
    let mut lambdas = vec![1.0 / p as f64; p];
    let t = windows.len() as f64;
    let mut ll = mtd_loglik(&windows, &lambdas, &transition);
    let mut iterations = 0;
    let mut converged = p == 1;

    while !converged && iterations < opts.max_sweeps {
        iterations += 1;
        let mut lambda_acc = vec![0.0; p];
        let mut counts = vec![vec![0.0; k]; k];
        for (lags, y) in &windows {
            let w: Vec<f64> = lags.iter().zip(&lambdas).map(|(&i, l)| l * transition[i][*y]).collect();
            let s: f64 = w.iter().sum();
            if s <= 0.0 {
                continue;
            }
            for (kk, (&i, wk)) in lags.iter().zip(&w).enumerate() {
                let r = wk / s;
                lambda_acc[kk] += r;
                counts[i][*y] += r;
            }
        }
        let total: f64 = lambda_acc.iter().sum();
        lambdas = lambda_acc.iter().map(|v| v / total).collect();
        transition = normalise_rows(counts, &marginal);
        let next = mtd_loglik(&windows, &lambdas, &transition);
        let gain = (next - ll) / t;
        ll = next;
        if gain.abs() < opts.tol {
            converged = true;
        }
    }

    Ok(MtdModel {
        order: p,
        n_categories: k,
        lambdas,
        transition,
        marginal,
        log_likelihood: ll,
        iterations,
        converged,
    })
}

fn normalise_rows(counts: Vec<Vec<f64>>, fallback: &[f64]) -> Vec<Vec<f64>> {
    counts
        .into_iter()
        .map(|row| {
            let s: f64 = row.iter().sum();
            if s > 0.0 {
                row.iter().map(|v| v / s).collect()
            } else {
                fallback.to_vec()
            }
        })
        .collect()
}

fn mtd_loglik(windows: &[(Vec<usize>, usize)], lambdas: &[f64], q: &[Vec<f64>]) -> f64 {
    windows
        .iter()
        .map(|(lags, y)| {
            let s: f64 = lags.iter().zip(lambdas).map(|(&i, l)| l * q[i][*y]).sum();
            s.max(f64::MIN_POSITIVE).ln()
        })
        .sum()
}

impl MtdModel {
    /// `m (m+1) + p - 1`.
    pub fn free_parameters(&self) -> usize {
        (self.n_categories - 1) * self.n_categories + self.order - 1
    }

    pub fn distribution_from_lags(&self, lags: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_categories];
        for (&i, l) in lags.iter().zip(&self.lambdas) {
            for (o, q) in out.iter_mut().zip(&self.transition[i]) {
                *o += l * q;
            }
        }
        out
    }
}

impl OneStepForecaster for MtdModel {
    fn n_categories(&self) -> usize {
        self.n_categories
    }

    fn max_lag(&self) -> usize {
        self.order
    }

    fn distribution(&self, _: NaiveDate, lag: &dyn Fn(usize) -> Option<usize>) -> Result<Vec<f64>> {
        Ok(self.distribution_from_lags(&lags_for(self.order, lag)?))
    }
}

pub const PAR_PHI_MIN: f64 = 1e-6;
pub const PAR_PHI_MAX: f64 = 1.0 - 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParModel {
    pub order: usize,
    pub n_categories: usize,
    pub phi: Vec<f64>,
    pub marginal: Vec<f64>,
    /// `phi[k]` sits on the clamp boundary (either end, or the sum constraint).
    pub boundary: Vec<bool>,
    pub log_likelihood: f64,
}

/// Windows grouped by `(which lags equal Y_t, Y_t)`; the likelihood only depends on these counts.
struct ParData {
    patterns: Vec<(Vec<bool>, f64, f64)>,
}

impl ParData {
    fn new(windows: &[(Vec<usize>, usize)], marginal: &[f64]) -> Self {
        let mut counts: BTreeMap<(Vec<bool>, usize), usize> = BTreeMap::new();
        for (lags, y) in windows {
            *counts.entry((lags.iter().map(|l| l == y).collect(), *y)).or_default() += 1;
        }
        let patterns = counts
            .into_iter()
            .map(|((hits, y), c)| (hits, marginal[y], c as f64))
            .collect();
        ParData { patterns }
    }

    fn loglik(&self, phi: &[f64]) -> f64 {
        let rest = 1.0 - phi.iter().sum::<f64>();
        self.patterns
            .iter()
            .map(|(hits, pi, count)| {
                let mass: f64 = hits.iter().zip(phi).filter(|(hit, _)| **hit).map(|(_, f)| f).sum();
                count * (mass + rest * pi).ln()
            })
            .sum()
    }
}

/// PAR(p) fit: the marginal is the empirical distribution and each `phi_k` is found by
/// cyclic coordinate search, a 1e-3 grid followed by golden-section refinement.
pub fn fit_par(series: &OrdinalSeries, p: usize) -> Result<ParModel> {
    check_order(series, p)?;
    let freq = frequency_distribution(series);
    if freq.counts.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::TooFewCategories(1));
    }
    let marginal = freq.proportions;
    let windows = lag_windows(series, p);
    if windows.is_empty() {
        return Err(Error::InsufficientHistory(format!("no gap-free windows of length {}", p + 1)));
    }
    let data = ParData::new(&windows, &marginal);

    let mut phi = vec![PAR_PHI_MIN; p];
    for _sweep in 0..200 {
        let mut max_change: f64 = 0.0;
        for k in 0..p {
            let others: f64 = phi.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, v)| v).sum();
            let hi = PAR_PHI_MAX - others;
            let lo = PAR_PHI_MIN;
            let best = if hi <= lo {
                lo
            } else {
                let f = |v: f64| {
                    let mut trial = phi.clone();
                    trial[k] = v;
                    data.loglik(&trial)
                };
                maximise_1d(f, lo, hi)
            };
            max_change = max_change.max((best - phi[k]).abs());
            phi[k] = best;
        }
        if p == 1 || max_change < 1e-9 {
            break;
        }
    }

    let total: f64 = phi.iter().sum();
    let eps = 1e-9;
    let boundary = phi
        .iter()
        .map(|&v| v <= PAR_PHI_MIN + eps || v >= PAR_PHI_MAX - eps || total >= PAR_PHI_MAX - eps)
        .collect();
    Ok(ParModel {
        order: p,
        n_categories: series.n_categories(),
        log_likelihood: data.loglik(&phi),
        phi,
        marginal,
        boundary,
    })
}

/// Grid search at step 1e-3 on `[lo, hi]`, then golden-section refinement around the best node.
fn maximise_1d(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let step = 1e-3;
    let mut nodes: Vec<f64> = (0..)
        .map(|i| lo + step * i as f64)
        .take_while(|v| *v < hi)
        .collect();
    nodes.push(hi);
    let (mut best, mut best_val) = (lo, f64::NEG_INFINITY);
    for &v in &nodes {
        let fv = f(v);
        if fv > best_val {
            best = v;
            best_val = fv;
        }
    }
    let (mut a, mut b) = ((best - step).max(lo), (best + step).min(hi));
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-10 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    // a boundary node can beat every interior point of the bracket
    [mid, best]
        .into_iter()
        .max_by(|x, y| f(*x).total_cmp(&f(*y)))
        .expect("two candidates")
}

impl ParModel {
    pub fn distribution_from_lags(&self, lags: &[usize]) -> Vec<f64> {
        let rest = 1.0 - self.phi.iter().sum::<f64>();
        let mut out: Vec<f64> = self.marginal.iter().map(|pi| rest * pi).collect();
        for (&y, f) in lags.iter().zip(&self.phi) {
            out[y] += f;
        }
        out
    }
}

impl OneStepForecaster for ParModel {
    fn n_categories(&self) -> usize {
        self.n_categories
    }

    fn max_lag(&self) -> usize {
        self.order
    }

    fn distribution(&self, _: NaiveDate, lag: &dyn Fn(usize) -> Option<usize>) -> Result<Vec<f64>> {
        Ok(self.distribution_from_lags(&lags_for(self.order, lag)?))
    }
}

/// Conditional distribution and its argmax (ties to the lower code) given the most recent
/// categories, newest first.
pub fn forecast_baseline<M: OneStepForecaster + ?Sized>(model: &M, recent: &[usize]) -> Result<(Vec<f64>, usize)> {
    if recent.len() < model.max_lag() {
        return Err(Error::InsufficientHistory(format!(
            "need {} lags, got {}",
            model.max_lag(),
            recent.len()
        )));
    }
    let lag = |k: usize| recent.get(k - 1).copied();
    let probs = model.distribution(NaiveDate::MIN, &lag)?;
    let best = argmax_lowest(&probs);
    Ok((probs, best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{transition_matrix, CategoryScheme};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn series(codes: Vec<usize>, k: usize) -> OrdinalSeries {
        OrdinalSeries::from_codes("2020-01-01".parse().unwrap(), codes, CategoryScheme::numbered(k).unwrap())
            .unwrap()
    }

    fn iid(n: usize, probs: &[f64], seed: u64) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                probs.iter().position(|p| {
                    acc += p;
                    u < acc
                })
                .unwrap_or(probs.len() - 1)
            })
            .collect()
    }

    #[test]
    fn markov_one_matches_transition_matrix() {
        let s = series(vec![0, 0, 1, 1], 2);
        let m = fit_markov(&s, 1).unwrap();
        let t = transition_matrix(&s, 1).unwrap();
        assert_eq!(m.row(&[0]).unwrap().probs, t.probs[0]);
        assert_eq!(m.row(&[1]).unwrap().probs, t.probs[1]);
    }

    #[test]
    fn markov_order_checks() {
        let s = series(vec![0, 1, 0], 2);
        assert!(fit_markov(&s, 0).is_err());
        assert!(fit_markov(&s, 3).is_err());
    }

    #[test]
    fn markov_iid_rows_near_marginal() {
        let probs = [0.2, 0.5, 0.3];
        let s = series(iid(20000, &probs, 7), 3);
        let m = fit_markov(&s, 1).unwrap();
        for row in &m.rows {
            for (a, b) in row.probs.iter().zip(&probs) {
                // binomial SE at ~6700 per row is below 0.007
                assert!((a - b).abs() < 0.03);
            }
        }
    }

    #[test]
    fn markov_parameter_budget() {
        let s = series(iid(5000, &[0.2; 5], 3), 5);
        let m = fit_markov(&s, 2).unwrap();
        assert_eq!(m.max_free_parameters(), 100);
        assert!(m.free_parameters() <= 100);
    }

    #[test]
    fn markov_unseen_state_uses_marginal_and_ties_low() {
        let s = series(vec![0, 1, 0, 1, 1, 0], 3);
        let m = fit_markov(&s, 1).unwrap();
        let (probs, _) = forecast_baseline(&m, &[2]).unwrap();
        assert_eq!(probs, m.marginal);

        let s = series(vec![0, 0, 0, 1, 1, 1, 0], 2);
        let m = fit_markov(&s, 1).unwrap();
        // from 0: 0->0 twice, 0->1 once... construct an exact tie instead
        let tie = MarkovModel {
            order: 1,
            n_categories: 2,
            marginal: vec![0.5, 0.5],
            rows: vec![MarkovRow { state: vec![0], count: 2, probs: vec![0.5, 0.5] }],
        };
        assert_eq!(forecast_baseline(&tie, &[0]).unwrap().1, 0);
        assert!(forecast_baseline(&m, &[]).is_err());
    }

    #[test]
    fn mtd_one_equals_markov_one() {
        let codes = iid(500, &[0.3, 0.3, 0.4], 11);
        let s = series(codes, 3);
        let mtd = fit_mtd(&s, 1).unwrap();
        let mk = fit_markov(&s, 1).unwrap();
        assert_eq!(mtd.lambdas, vec![1.0]);
        for state in 0..3 {
            let a = mtd.distribution_from_lags(&[state]);
            let b = mk.distribution_from_lags(&[state]);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn mtd_parameter_count() {
        let s = series(iid(300, &[0.2; 5], 5), 5);
        assert_eq!(fit_mtd(&s, 2).unwrap().free_parameters(), 21);
    }

    #[test]
    fn mtd_recovers_lambda() {
        // MTD(2) with lambda = (0.7, 0.3)
        let q = [[0.8, 0.15, 0.05], [0.2, 0.6, 0.2], [0.1, 0.2, 0.7]];
        let lambda = [0.7, 0.3];
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut codes = vec![0usize, 1];
        for t in 2..10000 {
            let mut probs = [0.0; 3];
            for (k, l) in lambda.iter().enumerate() {
                let prev = codes[t - 1 - k];
                for j in 0..3 {
                    probs[j] += l * q[prev][j];
                }
            }
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            codes.push(probs.iter().position(|p| { acc += p; u < acc }).unwrap_or(2));
        }
        let fit = fit_mtd(&series(codes, 3), 2).unwrap();
        assert!(fit.converged);
        assert!((fit.lambdas[0] - 0.7).abs() < 0.1, "{:?}", fit.lambdas);
        assert!((fit.lambdas.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for row in &fit.transition {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn par_iid_collapses_to_marginal() {
        let s = series(iid(5000, &[0.5, 0.3, 0.2], 21), 3);
        let par = fit_par(&s, 1).unwrap();
        assert!(par.phi[0] < 0.05, "{:?}", par.phi);
        for last in 0..3 {
            assert_eq!(forecast_baseline(&par, &[last]).unwrap().1, 0);
        }
    }

    #[test]
    fn par_persistent_series_hits_upper_bound() {
        let scheme = CategoryScheme::numbered(2).unwrap();
        let start: NaiveDate = "2020-01-01".parse().unwrap();
        let mut dates: Vec<NaiveDate> = start.iter_days().take(30).collect();
        dates.extend("2020-03-01".parse::<NaiveDate>().unwrap().iter_days().take(30));
        let codes = [vec![0; 30], vec![1; 30]].concat();
        let s = OrdinalSeries::new(dates, codes, scheme).unwrap();
        let par = fit_par(&s, 1).unwrap();
        assert!(par.phi[0] > 1.0 - 1e-5);
        assert!(par.boundary[0]);
    }

    #[test]
    fn par_rejects_degenerate() {
        assert!(fit_par(&series(vec![1; 20], 3), 1).is_err());
    }

    #[test]
    fn par_distribution_is_the_mixture_formula() {
        let par = ParModel {
            order: 2,
            n_categories: 3,
            phi: vec![0.5, 0.2],
            marginal: vec![0.2, 0.3, 0.5],
            boundary: vec![false, false],
            log_likelihood: 0.0,
        };
        let d = par.distribution_from_lags(&[2, 0]);
        let expected = [0.2 + 0.3 * 0.2, 0.3 * 0.3, 0.5 + 0.3 * 0.5];
        for (a, b) in d.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let one = ParModel { order: 1, phi: vec![0.9], ..par };
        assert_eq!(forecast_baseline(&one, &[2]).unwrap().1, 2);
    }

    #[test]
    fn par_two_recovers_weights() {
        let pi = [0.3, 0.4, 0.3];
        let phi = [0.5, 0.2];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut codes = vec![0usize, 1];
        for t in 2..20000 {
            let u: f64 = rng.gen();
            let y = if u < phi[0] {
                codes[t - 1]
            } else if u < phi[0] + phi[1] {
                codes[t - 2]
            } else {
                iid(1, &pi, rng.gen())[0]
            };
            codes.push(y);
        }
        let par = fit_par(&series(codes, 3), 2).unwrap();
        assert!((par.phi[0] - 0.5).abs() < 0.05 && (par.phi[1] - 0.2).abs() < 0.05, "{:?}", par.phi);
    }
}
