//! Lag-wise auto-association measures for categorical series.
//!
//! All measures are computed from the empirical lag-h table of pairs
//! `(Y_t, Y_{t-h})`. Rows index `Y_t`, columns index `Y_{t-h}`. Categories with
//! a zero marginal are dropped before any ratio is formed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::OrdinalSeries;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagTable {
    pub lag: usize,
    /// `counts[i][j] = #{t : Y_t = i, Y_{t-h} = j}`
    pub counts: Vec<Vec<usize>>,
    pub joint: Vec<Vec<f64>>,
    pub n_pairs: usize,
}

impl LagTable {
    /// Marginal of `Y_t`.
    pub fn row_marginal(&self) -> Vec<f64> {
        self.joint.iter().map(|r| r.iter().sum()).collect()
    }

    /// Marginal of `Y_{t-h}`.
    pub fn col_marginal(&self) -> Vec<f64> {
        let k = self.joint.len();
        (0..k).map(|j| self.joint.iter().map(|r| r[j]).sum()).collect()
    }

    fn observed_rows(&self) -> usize {
        self.row_marginal().iter().filter(|p| **p > 0.0).count()
    }

    fn observed_cols(&self) -> usize {
        self.col_marginal().iter().filter(|p| **p > 0.0).count()
    }

    /// `m` used in the normaliser of Cramer's v: observed categories minus one.
    pub fn effective_m(&self) -> usize {
        self.observed_rows().min(self.observed_cols()).saturating_sub(1)
    }
}

/// Positional lag-h contingency table over the `n - h` pairs. `h = 0` pairs each value with itself.
pub fn lag_contingency(series: &OrdinalSeries, h: usize) -> Result<LagTable> {
    let n = series.len();
    if h >= n {
        return Err(Error::LagTooLarge { lag: h, len: n });
    }
    let k = series.n_categories();
    let codes = series.codes();
    let mut counts = vec![vec![0usize; k]; k];
    for t in h..n {
        counts[codes[t]][codes[t - h]] += 1;
    }
    let n_pairs = n - h;
    let joint = counts
        .iter()
        .map(|r| r.iter().map(|&c| c as f64 / n_pairs as f64).collect())
        .collect();
    Ok(LagTable { lag: h, counts, joint, n_pairs })
}

fn sum_sq(v: &[f64]) -> f64 {
    v.iter().map(|p| p * p).sum()
}

/// Cohen's kappa with chance agreement `sum_i p_i.^2`.
pub fn cohen_kappa_table(t: &LagTable) -> Result<f64> {
    let row = t.row_marginal();
    let chance = sum_sq(&row);
    if t.observed_rows() < 2 {
        return Err(Error::Undefined("kappa needs at least two observed categories".into()));
    }
    let agree: f64 = (0..row.len()).map(|i| t.joint[i][i]).sum();
    Ok((agree - chance) / (1.0 - chance))
}

/// Pearson's statistic `sum (N_ij - E_ij)^2 / E_ij` over cells with positive marginals.
pub fn pearson_x2_table(t: &LagTable) -> Result<f64> {
    if t.observed_rows() < 2 || t.observed_cols() < 2 {
        return Err(Error::Undefined("X2 needs at least two observed categories".into()));
    }
    let row = t.row_marginal();
    let col = t.col_marginal();
    let n = t.n_pairs as f64;
    let mut x2 = 0.0;
    for (i, pi) in row.iter().enumerate().filter(|(_, p)| **p > 0.0) {
        for (j, pj) in col.iter().enumerate().filter(|(_, p)| **p > 0.0) {
            let e = pi * pj;
            x2 += (t.joint[i][j] - e).powi(2) / e;
        }
    }
    Ok(n * x2)
}

pub fn cramers_v_table(t: &LagTable) -> Result<f64> {
    let x2 = pearson_x2_table(t)?;
    let m = t.effective_m() as f64;
    Ok((x2 / (t.n_pairs as f64 * m)).sqrt())
}

/// Goodman-Kruskal tau for predicting `Y_t` from `Y_{t-h}`.
pub fn gk_tau_table(t: &LagTable) -> Result<f64> {
    let row = t.row_marginal();
    let col = t.col_marginal();
    if t.observed_rows() < 2 {
        return Err(Error::Undefined("tau needs at least two observed categories".into()));
    }
    let chance = sum_sq(&row);
    let mut explained = 0.0;
    for r in &t.joint {
        for (pij, pj) in r.iter().zip(&col) {
            if *pj > 0.0 {
                explained += pij * pij / pj;
            }
        }
    }
    Ok((explained - chance) / (1.0 - chance))
}

/// Goodman-Kruskal gamma over all pairs of lag pairs; ties on either coordinate are excluded.
pub fn gk_gamma_table(t: &LagTable) -> Result<f64> {
    let k = t.counts.len();
    let (mut concordant, mut discordant) = (0u128, 0u128);
    for i in 0..k {
        for j in 0..k {
            let c = t.counts[i][j] as u128;
            if c == 0 {
                continue;
            }
            for i2 in i + 1..k {
                for j2 in 0..k {
                    let c2 = t.counts[i2][j2] as u128;
                    if j2 > j {
                        concordant += c * c2;
                    } else if j2 < j {
                        discordant += c * c2;
                    }
                }
            }
        }
    }
    let total = concordant + discordant;
    if total == 0 {
        return Err(Error::Undefined("gamma has no untied pairs".into()));
    }
    Ok((concordant as f64 - discordant as f64) / total as f64)
}

/// Mutual information normalised by the entropy of `Y_t`, natural logs, `0 ln 0 = 0`.
pub fn mutual_info_table(t: &LagTable) -> Result<f64> {
    let row = t.row_marginal();
    let col = t.col_marginal();
    let entropy_term: f64 = row.iter().filter(|p| **p > 0.0).map(|p| p * p.ln()).sum();
    if entropy_term == 0.0 {
        return Err(Error::Undefined("mutual information with a degenerate marginal".into()));
    }
    let mut mi = 0.0;
    for (i, r) in t.joint.iter().enumerate() {
        for (j, pij) in r.iter().enumerate() {
            if *pij > 0.0 {
                mi += pij * (pij / (row[i] * col[j])).ln();
            }
        }
    }
    Ok(-mi / entropy_term)
}

pub fn cohen_kappa(series: &OrdinalSeries, h: usize) -> Result<f64> {
    cohen_kappa_table(&lag_contingency(series, h)?)
}

pub fn cramers_v(series: &OrdinalSeries, h: usize) -> Result<f64> {
    cramers_v_table(&lag_contingency(series, h)?)
}

pub fn gk_tau(series: &OrdinalSeries, h: usize) -> Result<f64> {
    gk_tau_table(&lag_contingency(series, h)?)
}

pub fn gk_gamma(series: &OrdinalSeries, h: usize) -> Result<f64> {
    gk_gamma_table(&lag_contingency(series, h)?)
}

pub fn pearson_x2(series: &OrdinalSeries, h: usize) -> Result<f64> {
    pearson_x2_table(&lag_contingency(series, h)?)
}

pub fn mutual_info(series: &OrdinalSeries, h: usize) -> Result<f64> {
    mutual_info_table(&lag_contingency(series, h)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Kappa,
    CramersV,
    GkTau,
    GkGamma,
    PearsonX2,
    MutualInfo,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::Kappa,
        Measure::CramersV,
        Measure::GkTau,
        Measure::GkGamma,
        Measure::PearsonX2,
        Measure::MutualInfo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Kappa => "kappa",
            Measure::CramersV => "cramers_v",
            Measure::GkTau => "gk_tau",
            Measure::GkGamma => "gk_gamma",
            Measure::PearsonX2 => "pearson_x2",
            Measure::MutualInfo => "mutual_info",
        }
    }

    pub fn evaluate(self, table: &LagTable) -> Result<f64> {
        match self {
            Measure::Kappa => cohen_kappa_table(table),
            Measure::CramersV => cramers_v_table(table),
            Measure::GkTau => gk_tau_table(table),
            Measure::GkGamma => gk_gamma_table(table),
            Measure::PearsonX2 => pearson_x2_table(table),
            Measure::MutualInfo => mutual_info_table(table),
        }
    }
}

/// Values per measure, aligned with `lags`; `None` where the measure is undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationProfile {
    pub lags: Vec<usize>,
    pub measures: Vec<Measure>,
    pub values: Vec<Vec<Option<f64>>>,
}

impl AssociationProfile {
    pub fn series_for(&self, measure: Measure) -> Option<&[Option<f64>]> {
        self.measures
            .iter()
            .position(|m| *m == measure)
            .map(|i| self.values[i].as_slice())
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["lag".to_string()];
        header.extend(self.measures.iter().map(|m| m.name().to_string()));
        w.write_record(&header)?;
        for (i, lag) in self.lags.iter().enumerate() {
            let mut rec = vec![lag.to_string()];
            rec.extend(self.values.iter().map(|v| v[i].map_or(String::new(), |x| x.to_string())));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Every requested measure at lags `0..=max_lag`.
pub fn association_profile(
    series: &OrdinalSeries,
    max_lag: usize,
    measures: &[Measure],
) -> Result<AssociationProfile> {
    if max_lag > 0 && 2 * max_lag >= series.len() {
        return Err(Error::InvalidArgument(format!(
            "max lag {max_lag} must be below half the series length {}",
            series.len()
        )));
    }
    let lags: Vec<usize> = (0..=max_lag).collect();
    let tables = lags
        .iter()
        .map(|&h| lag_contingency(series, h))
        .collect::<Result<Vec<_>>>()?;
    let values = measures
        .iter()
        .map(|m| tables.iter().map(|t| m.evaluate(t).ok()).collect())
        .collect();
    Ok(AssociationProfile { lags, measures: measures.to_vec(), values })
}
