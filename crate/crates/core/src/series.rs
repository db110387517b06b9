//! Ordinal series representation and the descriptive statistics computed on it.

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered categories with inclusive upper cutoffs on the underlying index.
///
/// The last category is unbounded above, so its cutoff is `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScheme")]
pub struct CategoryScheme {
    labels: Vec<String>,
    bounds: Vec<Option<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScheme {
    labels: Vec<String>,
    bounds: Vec<Option<f64>>,
}

impl TryFrom<RawScheme> for CategoryScheme {
    type Error = Error;

    fn try_from(raw: RawScheme) -> Result<Self> {
        CategoryScheme::new(raw.labels, raw.bounds)
    }
}

impl CategoryScheme {
    pub fn new(labels: Vec<String>, bounds: Vec<Option<f64>>) -> Result<Self> {
        if labels.len() < 2 {
            return Err(Error::InvalidScheme("need at least two categories".into()));
        }
        if labels.len() != bounds.len() {
            return Err(Error::InvalidScheme(format!(
                "{} labels but {} bounds",
                labels.len(),
                bounds.len()
            )));
        }
        let (last, finite) = bounds.split_last().expect("non-empty");
        if last.is_some() {
            return Err(Error::InvalidScheme("last category must be unbounded".into()));
        }
        let mut prev = f64::NEG_INFINITY;
        for (i, b) in finite.iter().enumerate() {
            match b {
                Some(v) if v.is_finite() && *v > prev => prev = *v,
                Some(v) => {
                    return Err(Error::InvalidScheme(format!(
                        "bound {v} for {:?} is not finite and strictly increasing",
                        labels[i]
                    )))
                }
                None => {
                    return Err(Error::InvalidScheme(format!(
                        "only the last category may be unbounded, {:?} is not last",
                        labels[i]
                    )))
                }
            }
        }
        Ok(Self { labels, bounds })
    }

    /// Indian National AQI classes: Good, Satisfactory, Moderate, Poor, Very Poor, Severe.
    pub fn national_aqi() -> Self {
        let labels = ["Good", "Satisfactory", "Moderate", "Poor", "Very Poor", "Severe"];
        let bounds = vec![
            Some(50.0),
            Some(100.0),
            Some(200.0),
            Some(300.0),
            Some(400.0),
            None,
        ];
        Self::new(labels.iter().map(|s| s.to_string()).collect(), bounds).expect("valid scheme")
    }

    /// A scheme with `k` anonymous categories `"0".."k-1"` and unit-spaced cutoffs.
    pub fn numbered(k: usize) -> Result<Self> {
        let labels = (0..k).map(|i| i.to_string()).collect();
        let bounds = (0..k)
            .map(|i| if i + 1 < k { Some(i as f64) } else { None })
            .collect();
        Self::new(labels, bounds)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn bounds(&self) -> &[Option<f64>] {
        &self.bounds
    }

    /// Number of categories, `m + 1`.
    pub fn n_categories(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, code: usize) -> Option<&str> {
        self.labels.get(code).map(String::as_str)
    }

    /// Category code for an index value; cutoffs are inclusive upper bounds.
    pub fn categorize(&self, value: f64) -> usize {
        self.bounds
            .iter()
            .position(|b| b.map_or(true, |cut| value <= cut))
            .expect("last category is unbounded")
    }

    /// A value that falls into `code`: its cutoff, or one past the previous cutoff for the open top class.
    pub fn representative_value(&self, code: usize) -> Option<f64> {
        match self.bounds.get(code)? {
            Some(cut) => Some(*cut),
            None => Some(self.bounds[code - 1].expect("finite") + 1.0),
        }
    }
}

/// A daily sequence of category codes. Dates are strictly increasing; gaps are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSeries")]
pub struct OrdinalSeries {
    scheme: CategoryScheme,
    dates: Vec<NaiveDate>,
    codes: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSeries {
    scheme: CategoryScheme,
    dates: Vec<NaiveDate>,
    codes: Vec<usize>,
}

impl TryFrom<RawSeries> for OrdinalSeries {
    type Error = Error;

    fn try_from(raw: RawSeries) -> Result<Self> {
        OrdinalSeries::new(raw.dates, raw.codes, raw.scheme)
    }
}

impl OrdinalSeries {
    pub fn new(dates: Vec<NaiveDate>, codes: Vec<usize>, scheme: CategoryScheme) -> Result<Self> {
        if dates.is_empty() {
            return Err(Error::InvalidSeries("series is empty".into()));
        }
        if dates.len() != codes.len() {
            return Err(Error::InvalidSeries(format!(
                "{} dates but {} codes",
                dates.len(),
                codes.len()
            )));
        }
        if let Some(i) = dates.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSeries(format!(
                "dates not strictly increasing at index {}: {} then {}",
                i + 1,
                dates[i],
                dates[i + 1]
            )));
        }
        let k = scheme.n_categories();
        if let Some(i) = codes.iter().position(|&c| c >= k) {
            return Err(Error::InvalidSeries(format!(
                "code {} at index {i} outside 0..{}",
                codes[i],
                k - 1
            )));
        }
        Ok(Self { scheme, dates, codes })
    }

    /// Consecutive daily dates starting at `start`.
    pub fn from_codes(start: NaiveDate, codes: Vec<usize>, scheme: CategoryScheme) -> Result<Self> {
        let dates = start.iter_days().take(codes.len()).collect();
        Self::new(dates, codes, scheme)
    }

    pub fn scheme(&self) -> &CategoryScheme {
        &self.scheme
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn codes(&self) -> &[usize] {
        &self.codes
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn n_categories(&self) -> usize {
        self.scheme.n_categories()
    }

    pub fn first_date(&self) -> NaiveDate {
        self.dates[0]
    }

    pub fn last_date(&self) -> NaiveDate {
        *self.dates.last().expect("non-empty")
    }

    pub fn index_of(&self, date: NaiveDate) -> Option<usize> {
        self.dates.binary_search(&date).ok()
    }

    pub fn code_on(&self, date: NaiveDate) -> Option<usize> {
        self.index_of(date).map(|i| self.codes[i])
    }

    /// Pairs of consecutive observations more than one day apart.
    pub fn gaps(&self) -> Vec<(NaiveDate, NaiveDate)> {
        self.dates
            .windows(2)
            .filter(|w| (w[1] - w[0]).num_days() > 1)
            .map(|w| (w[0], w[1]))
            .collect()
    }

    /// Observations with `start <= date <= end`.
    pub fn between(&self, start: NaiveDate, end: NaiveDate) -> Result<Self> {
        let lo = self.dates.partition_point(|d| *d < start);
        let hi = self.dates.partition_point(|d| *d <= end);
        if lo >= hi {
            return Err(Error::InvalidSeries(format!(
                "no observations between {start} and {end}"
            )));
        }
        Self::new(
            self.dates[lo..hi].to_vec(),
            self.codes[lo..hi].to_vec(),
            self.scheme.clone(),
        )
    }

    /// Positional split: the first `n_head` observations and the rest.
    pub fn split_at(&self, n_head: usize) -> Result<(Self, Self)> {
        if n_head == 0 || n_head >= self.len() {
            return Err(Error::InvalidArgument(format!(
                "split point {n_head} outside 1..{}",
                self.len()
            )));
        }
        let head = Self::new(
            self.dates[..n_head].to_vec(),
            self.codes[..n_head].to_vec(),
            self.scheme.clone(),
        )?;
        let tail = Self::new(
            self.dates[n_head..].to_vec(),
            self.codes[n_head..].to_vec(),
            self.scheme.clone(),
        )?;
        Ok((head, tail))
    }
}

/// Map per-date index values to category codes.
pub fn encode_series(
    dates: Vec<NaiveDate>,
    values: &[f64],
    scheme: &CategoryScheme,
) -> Result<OrdinalSeries> {
    if let Some(row) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidAqi { row, value: values[row] });
    }
    let codes = values.iter().map(|&v| scheme.categorize(v)).collect();
    OrdinalSeries::new(dates, codes, scheme.clone())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frequencies {
    pub counts: Vec<usize>,
    pub proportions: Vec<f64>,
}

pub fn frequency_distribution(series: &OrdinalSeries) -> Frequencies {
    let mut counts = vec![0usize; series.n_categories()];
    for &c in series.codes() {
        counts[c] += 1;
    }
    let n = series.len() as f64;
    let proportions = counts.iter().map(|&c| c as f64 / n).collect();
    Frequencies { counts, proportions }
}

/// Empirical lag-`lag` transition probabilities.
///
/// `empty_rows[i]` marks states never observed as a predecessor; their rows are all zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    pub lag: usize,
    pub counts: Vec<Vec<usize>>,
    pub probs: Vec<Vec<f64>>,
    pub empty_rows: Vec<bool>,
}

impl TransitionMatrix {
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.probs.len()).map(|i| self.probs[i][i]).collect()
    }
}

/// Transition matrix over pairs exactly `lag` calendar days apart. A gap in the dates breaks the chain.
pub fn transition_matrix(series: &OrdinalSeries, lag: usize) -> Result<TransitionMatrix> {
    if lag == 0 {
        return Err(Error::InvalidArgument("lag must be positive".into()));
    }
    if lag >= series.len() {
        return Err(Error::LagTooLarge { lag, len: series.len() });
    }
    let k = series.n_categories();
    let mut counts = vec![vec![0usize; k]; k];
    let step = chrono::Duration::days(lag as i64);
    for (date, &to) in series.dates().iter().zip(series.codes()) {
        if let Some(from) = series.code_on(*date - step) {
            counts[from][to] += 1;
        }
    }
    let mut probs = vec![vec![0.0; k]; k];
    let mut empty_rows = vec![false; k];
    for i in 0..k {
        let total: usize = counts[i].iter().sum();
        if total == 0 {
            empty_rows[i] = true;
            continue;
        }
        for j in 0..k {
            probs[i][j] = counts[i][j] as f64 / total as f64;
        }
    }
    Ok(TransitionMatrix { lag, counts, probs, empty_rows })
}

/// 12 x (m+1) month-by-category counts, or row percentages when `normalize` is set.
pub fn month_category_intensity(series: &OrdinalSeries, normalize: bool) -> Vec<Vec<f64>> {
    let k = series.n_categories();
    let mut cells = vec![vec![0.0; k]; 12];
    for (date, &c) in series.dates().iter().zip(series.codes()) {
        cells[date.month0() as usize][c] += 1.0;
    }
    if normalize {
        for row in &mut cells {
            let days: f64 = row.iter().sum();
            if days > 0.0 {
                row.iter_mut().for_each(|v| *v = *v / days * 100.0);
            }
        }
    }
    cells
}

/// Cumulative count of each category up to and including each time point; `paths[j][t]`.
pub fn rate_evolution(series: &OrdinalSeries) -> Vec<Vec<usize>> {
    let k = series.n_categories();
    let mut paths = vec![Vec::with_capacity(series.len()); k];
    let mut running = vec![0usize; k];
    for &c in series.codes() {
        running[c] += 1;
        for (path, &r) in paths.iter_mut().zip(&running) {
            path.push(r);
        }
    }
    paths
}
