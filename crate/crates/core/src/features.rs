//! Covariates for the seasonal proportional-odds models.
//!
//! A [`CovariateSpec`] is an ordered list of terms. Each term yields one design
//! column, in term order, and that order is persisted with every fitted model.
//! Time-indexed terms use `t = 1` at the design origin (the first training
//! date) and keep counting in calendar days from there.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::OrdinalSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrigKind {
    Sin,
    Cos,
    AbsSin,
    AbsCos,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierTermSpec {
    pub period: f64,
    pub kind: TrigKind,
    #[serde(default = "one")]
    pub harmonic: u32,
}

fn one() -> u32 {
    1
}

impl FourierTermSpec {
    pub fn new(period: f64, kind: TrigKind) -> Self {
        Self { period, kind, harmonic: 1 }
    }

    pub fn with_harmonic(mut self, k: u32) -> Self {
        self.harmonic = k;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.period.is_finite() && self.period > 0.0) {
            return Err(Error::InvalidSpec(format!("period must be positive, got {}", self.period)));
        }
        if self.harmonic == 0 {
            return Err(Error::InvalidSpec("harmonic must be at least 1".into()));
        }
        Ok(())
    }

    fn name(&self) -> String {
        let kind = match self.kind {
            TrigKind::Sin => "sin",
            TrigKind::Cos => "cos",
            TrigKind::AbsSin => "abs_sin",
            TrigKind::AbsCos => "abs_cos",
        };
        if self.harmonic == 1 {
            format!("{kind}_{}", self.period)
        } else {
            format!("{kind}_{}_k{}", self.period, self.harmonic)
        }
    }
}

/// Value of one trigonometric seasonal term at time index `t`.
///
/// The phase is reduced exactly in integer arithmetic when the period is a whole
/// number of days, so the term is exactly periodic.
pub fn fourier_features(t: i64, spec: &FourierTermSpec) -> f64 {
    let k = spec.harmonic as i64;
    let frac = if spec.period.fract() == 0.0 && spec.period < i64::MAX as f64 {
        let p = spec.period as i64;
        (k * t).rem_euclid(p) as f64 / spec.period
    } else {
        ((k * t) as f64 / spec.period).rem_euclid(1.0)
    };
    let angle = 2.0 * PI * frac;
    match spec.kind {
        TrigKind::Sin => angle.sin(),
        TrigKind::Cos => angle.cos(),
        TrigKind::AbsSin => angle.sin().abs(),
        TrigKind::AbsCos => angle.cos().abs(),
    }
}

/// The four synthetic block indicators of the simulated indicator-seasonality process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimBlock {
    /// Days 1..=30 of each 100-day cycle.
    S1a,
    /// Days 31..=70 of each 100-day cycle.
    S1b,
    /// Days 4 and 5 of each 5-day cycle.
    S2,
    /// Days 81..=85 of each 100-day cycle.
    S3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimIndicators {
    pub s1a: bool,
    pub s1b: bool,
    pub s2: bool,
    pub s3: bool,
}

impl SimIndicators {
    pub fn get(&self, block: SimBlock) -> bool {
        match block {
            SimBlock::S1a => self.s1a,
            SimBlock::S1b => self.s1b,
            SimBlock::S2 => self.s2,
            SimBlock::S3 => self.s3,
        }
    }
}

pub fn sim_indicators(t: i64) -> SimIndicators {
    let day100 = (t - 1).rem_euclid(100) + 1;
    let day5 = (t - 1).rem_euclid(5) + 1;
    SimIndicators {
        s1a: (1..=30).contains(&day100),
        s1b: (31..=70).contains(&day100),
        s2: day5 >= 4,
        s3: (81..=85).contains(&day100),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndicatorSpec {
    /// One-hot dummy for a non-baseline season of the calendar.
    Season { level: String },
    Weekend,
    /// 1 on `[festival - before, festival + after]` for the festival of the date's year.
    FestivalWindow {
        #[serde(default = "seven")]
        before: u32,
        #[serde(default = "seven")]
        after: u32,
    },
    SimBlock(SimBlock),
}

fn seven() -> u32 {
    7
}

impl IndicatorSpec {
    fn name(&self) -> String {
        match self {
            IndicatorSpec::Season { level } => format!("season_{level}"),
            IndicatorSpec::Weekend => "weekend".into(),
            IndicatorSpec::FestivalWindow { .. } => "festival".into(),
            IndicatorSpec::SimBlock(b) => match b {
                SimBlock::S1a => "s1a",
                SimBlock::S1b => "s1b",
                SimBlock::S2 => "s2",
                SimBlock::S3 => "s3",
            }
            .into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeasonDef {
    pub name: String,
    pub months: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalendarConfig {
    pub seasons: Vec<SeasonDef>,
    pub baseline: String,
    /// One festival date per covered year.
    #[serde(default)]
    pub festival_dates: Vec<NaiveDate>,
    #[serde(default = "default_weekend")]
    pub weekend_days: Vec<Weekday>,
}

fn default_weekend() -> Vec<Weekday> {
    vec![Weekday::Sat, Weekday::Sun]
}

impl Default for CalendarConfig {
    /// Summer Mar-May, Monsoon Jun-Sep, Autumn Oct-Nov (baseline), Winter Dec-Feb.
    fn default() -> Self {
        let season = |name: &str, months: &[u32]| SeasonDef { name: name.into(), months: months.to_vec() };
        Self {
            seasons: vec![
                season("summer", &[3, 4, 5]),
                season("monsoon", &[6, 7, 8, 9]),
                season("autumn", &[10, 11]),
                season("winter", &[12, 1, 2]),
            ],
            baseline: "autumn".into(),
            festival_dates: Vec::new(),
            weekend_days: default_weekend(),
        }
    }
}

impl CalendarConfig {
    pub fn with_festival_dates(mut self, dates: Vec<NaiveDate>) -> Self {
        self.festival_dates = dates;
        self
    }

    fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for s in &self.seasons {
            for &m in &s.months {
                if !(1..=12).contains(&m) {
                    return Err(Error::InvalidSpec(format!("season {} has month {m}", s.name)));
                }
                if !seen.insert(m) {
                    return Err(Error::InvalidSpec(format!("month {m} assigned to two seasons")));
                }
            }
        }
        if !self.seasons.iter().any(|s| s.name == self.baseline) {
            return Err(Error::InvalidSpec(format!("baseline season {:?} not defined", self.baseline)));
        }
        let mut years = BTreeSet::new();
        for d in &self.festival_dates {
            if !years.insert(d.year()) {
                return Err(Error::InvalidSpec(format!("two festival dates in {}", d.year())));
            }
        }
        Ok(())
    }

    pub fn season_of(&self, date: NaiveDate) -> Result<&str> {
        self.seasons
            .iter()
            .find(|s| s.months.contains(&date.month()))
            .map(|s| s.name.as_str())
            .ok_or_else(|| Error::OutOfCalendar(date.to_string()))
    }

    pub fn festival_in(&self, year: i32) -> Result<NaiveDate> {
        self.festival_dates
            .iter()
            .copied()
            .find(|d| d.year() == year)
            .ok_or(Error::MissingFestival(year))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Term {
    Fourier(FourierTermSpec),
    Indicator(IndicatorSpec),
    /// The response code `p` days earlier, used as a numeric covariate.
    Lag(usize),
}

impl Term {
    pub fn name(&self) -> String {
        match self {
            Term::Fourier(f) => f.name(),
            Term::Indicator(i) => i.name(),
            Term::Lag(p) => format!("lag{p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovariateSpec {
    pub terms: Vec<Term>,
    #[serde(default)]
    pub calendar: CalendarConfig,
}

impl CovariateSpec {
    pub fn new(terms: Vec<Term>, calendar: CalendarConfig) -> Result<Self> {
        let spec = Self { terms, calendar };
        spec.validate()?;
        Ok(spec)
    }

    /// No covariates: thresholds only.
    pub fn intercept_only() -> Self {
        Self { terms: Vec::new(), calendar: CalendarConfig::default() }
    }

    /// Weekly and yearly cos/sin pairs plus the lag-1 response.
    pub fn tsolr_daily() -> Self {
        let mut terms = Vec::new();
        for period in [7.0, 365.0] {
            terms.push(Term::Fourier(FourierTermSpec::new(period, TrigKind::Cos)));
            terms.push(Term::Fourier(FourierTermSpec::new(period, TrigKind::Sin)));
        }
        terms.push(Term::Lag(1));
        Self { terms, calendar: CalendarConfig::default() }
    }

    /// Summer, monsoon and winter dummies, festival window, weekend, and the lag-1 response.
    pub fn isolr_daily(calendar: CalendarConfig) -> Result<Self> {
        let mut terms: Vec<Term> = ["summer", "monsoon", "winter"]
            .iter()
            .map(|s| Term::Indicator(IndicatorSpec::Season { level: s.to_string() }))
            .collect();
        terms.push(Term::Indicator(IndicatorSpec::FestivalWindow { before: 7, after: 7 }));
        terms.push(Term::Indicator(IndicatorSpec::Weekend));
        terms.push(Term::Lag(1));
        Self::new(terms, calendar)
    }

    /// Covariates of the simulated trigonometric process: sin/cos at periods 100 and 5,
    /// |sin|/|cos| at period 100, and the lag-1 response, in that order.
    pub fn tsolr_simulation() -> Self {
        use TrigKind::*;
        let f = |p, k| Term::Fourier(FourierTermSpec::new(p, k));
        Self {
            terms: vec![
                f(100.0, Sin),
                f(100.0, Cos),
                f(5.0, Sin),
                f(5.0, Cos),
                f(100.0, AbsSin),
                f(100.0, AbsCos),
                Term::Lag(1),
            ],
            calendar: CalendarConfig::default(),
        }
    }

    /// Covariates of the simulated indicator process: S1a, S1b, S2, S3 and the lag-1 response.
    pub fn isolr_simulation() -> Self {
        let b = |b| Term::Indicator(IndicatorSpec::SimBlock(b));
        Self {
            terms: vec![
                b(SimBlock::S1a),
                b(SimBlock::S1b),
                b(SimBlock::S2),
                b(SimBlock::S3),
                Term::Lag(1),
            ],
            calendar: CalendarConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.calendar.validate()?;
        for term in &self.terms {
            match term {
                Term::Fourier(f) => f.validate()?,
                Term::Lag(0) => return Err(Error::InvalidSpec("lag order must be at least 1".into())),
                Term::Lag(_) => {}
                Term::Indicator(IndicatorSpec::Season { level }) => {
                    if *level == self.calendar.baseline {
                        return Err(Error::InvalidSpec(format!("season {level:?} is the baseline")));
                    }
                    if !self.calendar.seasons.iter().any(|s| &s.name == level) {
                        return Err(Error::InvalidSpec(format!("unknown season {level:?}")));
                    }
                }
                Term::Indicator(_) => {}
            }
        }
        Ok(())
    }

    pub fn n_columns(&self) -> usize {
        self.terms.len()
    }

    pub fn column_names(&self) -> Vec<String> {
        self.terms.iter().map(Term::name).collect()
    }

    pub fn max_lag(&self) -> usize {
        self.terms
            .iter()
            .filter_map(|t| match t {
                Term::Lag(p) => Some(*p),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Covariate row at calendar `date` / time index `t`; `lag(p)` supplies the response `p` days back.
    pub fn feature_row(
        &self,
        t: i64,
        date: NaiveDate,
        lag: impl Fn(usize) -> Option<usize>,
    ) -> Result<Vec<f64>> {
        let mut indicators = indicator_features(date, self)?.into_iter();
        let sim = sim_indicators(t);
        self.terms
            .iter()
            .map(|term| match term {
                Term::Fourier(f) => Ok(fourier_features(t, f)),
                Term::Indicator(IndicatorSpec::SimBlock(b)) => Ok(f64::from(u8::from(sim.get(*b)))),
                Term::Indicator(_) => Ok(indicators.next().expect("one value per calendar indicator")),
                Term::Lag(p) => lag(*p).map(|c| c as f64).ok_or_else(|| {
                    Error::InsufficientHistory(format!("no observation {p} day(s) before {date}"))
                }),
            })
            .collect()
    }
}

/// Values of the calendar indicators (season, weekend, festival window) at `date`, in term order.
pub fn indicator_features(date: NaiveDate, spec: &CovariateSpec) -> Result<Vec<f64>> {
    let cal = &spec.calendar;
    let flag = |b: bool| f64::from(u8::from(b));
    let mut out = Vec::new();
    for term in &spec.terms {
        let value = match term {
            Term::Indicator(IndicatorSpec::Season { level }) => flag(cal.season_of(date)? == level),
            Term::Indicator(IndicatorSpec::Weekend) => flag(cal.weekend_days.contains(&date.weekday())),
            Term::Indicator(IndicatorSpec::FestivalWindow { before, after }) => {
                let fest = cal.festival_in(date.year())?;
                let lo = fest - Duration::days(i64::from(*before));
                let hi = fest + Duration::days(i64::from(*after));
                flag(lo <= date && date <= hi)
            }
            _ => continue,
        };
        out.push(value);
    }
    Ok(out)
}

/// Time index of `date` for a design whose origin (t = 1) is `origin`.
pub fn time_index(origin: NaiveDate, date: NaiveDate) -> i64 {
    (date - origin).num_days() + 1
}

/// Row-major design matrix with its aligned responses.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub columns: Vec<String>,
    pub x: Vec<f64>,
    pub responses: Vec<usize>,
    pub dates: Vec<NaiveDate>,
    pub times: Vec<i64>,
}

impl Design {
    pub fn n_rows(&self) -> usize {
        self.responses.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let p = self.n_cols();
        &self.x[i * p..(i + 1) * p]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows()).map(|i| self.row(i)[j]).collect()
    }

    /// A design holding the selected rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Design {
        let mut x = Vec::with_capacity(idx.len() * self.n_cols());
        for &i in idx {
            x.extend_from_slice(self.row(i));
        }
        Design {
            columns: self.columns.clone(),
            x,
            responses: idx.iter().map(|&i| self.responses[i]).collect(),
            dates: idx.iter().map(|&i| self.dates[i]).collect(),
            times: idx.iter().map(|&i| self.times[i]).collect(),
        }
    }
}

/// Design with the origin at the first observation of `series`.
pub fn build_design(series: &OrdinalSeries, spec: &CovariateSpec) -> Result<Design> {
    build_design_from(series, spec, series.first_date())
}

/// One row per observation whose lags are all present; rows lacking a lag are dropped.
pub fn build_design_from(
    series: &OrdinalSeries,
    spec: &CovariateSpec,
    origin: NaiveDate,
) -> Result<Design> {
    spec.validate()?;
    let max_lag = spec.max_lag();
    if series.len() <= max_lag {
        return Err(Error::EmptyDesign(format!(
            "series of length {} cannot supply lag {max_lag}",
            series.len()
        )));
    }
    let mut design = Design {
        columns: spec.column_names(),
        x: Vec::with_capacity(series.len() * spec.n_columns()),
        responses: Vec::with_capacity(series.len()),
        dates: Vec::with_capacity(series.len()),
        times: Vec::with_capacity(series.len()),
    };
    for (&date, &y) in series.dates().iter().zip(series.codes()) {
        let lag = |p: usize| series.code_on(date - Duration::days(p as i64));
        if (1..=max_lag).any(|p| spec.terms.contains(&Term::Lag(p)) && lag(p).is_none()) {
            continue;
        }
        let t = time_index(origin, date);
        design.x.extend(spec.feature_row(t, date, lag)?);
        design.responses.push(y);
        design.dates.push(date);
        design.times.push(t);
    }
    if design.responses.is_empty() {
        return Err(Error::EmptyDesign("every observation lacks a required lag".into()));
    }
    Ok(design)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::CategoryScheme;
    use proptest::prelude::*;

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    #[test]
    fn fourier_values_at_quarter_points() {
        let p = 100.0;
        assert_eq!(fourier_features(100, &FourierTermSpec::new(p, TrigKind::Cos)), 1.0);
        assert_eq!(fourier_features(25, &FourierTermSpec::new(p, TrigKind::Sin)), 1.0);
        assert_eq!(fourier_features(75, &FourierTermSpec::new(p, TrigKind::AbsSin)), 1.0);
        assert!((fourier_features(75, &FourierTermSpec::new(p, TrigKind::Sin)) + 1.0).abs() < 1e-15);
        // second harmonic doubles the frequency
        let h2 = FourierTermSpec::new(p, TrigKind::Sin).with_harmonic(2);
        assert!((fourier_features(25, &h2)).abs() < 1e-15);
    }

    #[test]
    fn sim_indicator_examples() {
        assert!(sim_indicators(31).s1b && !sim_indicators(31).s1a);
        assert!(sim_indicators(30).s1a);
        assert!(sim_indicators(4).s2 && sim_indicators(5).s2 && !sim_indicators(6).s2);
        assert!(sim_indicators(85).s3 && !sim_indicators(86).s3 && sim_indicators(181).s3);
        assert!(!sim_indicators(71).s1a && !sim_indicators(71).s1b);
    }

    #[test]
    fn sim_indicator_block_sums() {
        for block in 0..3 {
            let ts = (1..=100).map(|i| sim_indicators(block * 100 + i));
            let (mut a, mut b, mut s3) = (0, 0, 0);
            for s in ts {
                assert!(!(s.s1a && s.s1b));
                a += s.s1a as i32;
                b += s.s1b as i32;
                s3 += s.s3 as i32;
            }
            assert_eq!((a, b, s3), (30, 40, 5));
        }
        for k in 0..40 {
            let s2: i32 = (1..=5).map(|i| sim_indicators(5 * k + i).s2 as i32).sum();
            assert_eq!(s2, 2);
        }
    }

    fn festival_spec() -> CovariateSpec {
        let cal = CalendarConfig::default().with_festival_dates(vec![d("2022-10-24"), d("2023-11-12")]);
        CovariateSpec::isolr_daily(cal).unwrap()
    }

    #[test]
    fn calendar_indicators() {
        let spec = festival_spec();
        // 2023-10-07 is a Saturday in the autumn baseline, well before the festival window.
        assert_eq!(indicator_features(d("2023-10-07"), &spec).unwrap(), vec![0.0, 0.0, 0.0, 0.0, 1.0]);
        // festival day itself (a Sunday, autumn)
        assert_eq!(indicator_features(d("2023-11-12"), &spec).unwrap(), vec![0.0, 0.0, 0.0, 1.0, 1.0]);
        let festival = |s| indicator_features(d(s), &spec).unwrap()[3];
        assert_eq!(festival("2023-11-05"), 1.0);
        assert_eq!(festival("2023-11-19"), 1.0);
        assert_eq!(festival("2023-11-20"), 0.0);
        assert_eq!(festival("2023-11-04"), 0.0);
        // winter, Wednesday
        assert_eq!(indicator_features(d("2023-01-04"), &spec).unwrap(), vec![0.0, 0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn missing_festival_year_is_named() {
        let spec = festival_spec();
        match indicator_features(d("2024-03-01"), &spec) {
            Err(Error::MissingFestival(y)) => assert_eq!(y, 2024),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn spec_validation() {
        let cal = CalendarConfig::default();
        let baseline = vec![Term::Indicator(IndicatorSpec::Season { level: "autumn".into() })];
        assert!(CovariateSpec::new(baseline, cal.clone()).is_err());
        assert!(CovariateSpec::new(vec![Term::Lag(0)], cal.clone()).is_err());
        let bad_period = Term::Fourier(FourierTermSpec::new(0.0, TrigKind::Sin));
        assert!(CovariateSpec::new(vec![bad_period], cal).is_err());
    }

    #[test]
    fn spec_json_rejects_unknown_keys() {
        let ok = r#"{"terms":[{"fourier":{"period":7,"kind":"sin"}},{"indicator":"weekend"},{"lag":1}]}"#;
        let spec: CovariateSpec = serde_json::from_str(ok).unwrap();
        assert_eq!(spec.column_names(), vec!["sin_7", "weekend", "lag1"]);
        let bad = r#"{"terms":[],"colour":"red"}"#;
        assert!(serde_json::from_str::<CovariateSpec>(bad).is_err());
    }

    fn series(codes: &[usize], k: usize) -> OrdinalSeries {
        OrdinalSeries::from_codes(d("2020-01-01"), codes.to_vec(), CategoryScheme::numbered(k).unwrap())
            .unwrap()
    }

    #[test]
    fn lag_design() {
        let spec = CovariateSpec { terms: vec![Term::Lag(1)], calendar: CalendarConfig::default() };
        let design = build_design(&series(&[2, 0, 1], 3), &spec).unwrap();
        assert_eq!(design.responses, vec![0, 1]);
        assert_eq!(design.column(0), vec![2.0, 0.0]);
        assert_eq!(design.times, vec![2, 3]);
    }

    #[test]
    fn intercept_only_design() {
        let design = build_design(&series(&[2, 0, 1], 3), &CovariateSpec::intercept_only()).unwrap();
        assert_eq!(design.n_rows(), 3);
        assert_eq!(design.n_cols(), 0);
    }

    #[test]
    fn tsolr_daily_shape() {
        let codes: Vec<usize> = (0..400).map(|i| i % 6).collect();
        let design = build_design(&series(&codes, 6), &CovariateSpec::tsolr_daily()).unwrap();
        assert_eq!((design.n_rows(), design.n_cols()), (399, 5));
    }

    #[test]
    fn design_errors() {
        let spec = CovariateSpec { terms: vec![Term::Lag(3)], calendar: CalendarConfig::default() };
        assert!(matches!(build_design(&series(&[0, 1, 0], 2), &spec), Err(Error::EmptyDesign(_))));
    }

    #[test]
    fn design_is_deterministic() {
        let codes: Vec<usize> = (0..300).map(|i| (i * 7 + i / 3) % 4).collect();
        let s = series(&codes, 4);
        let a = build_design(&s, &CovariateSpec::tsolr_simulation()).unwrap();
        let b = build_design(&s, &CovariateSpec::tsolr_simulation()).unwrap();
        let bits = |d: &Design| d.x.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        assert_eq!(a.responses, b.responses);
    }

    proptest! {
        #[test]
        fn fourier_is_exactly_periodic(
            t in -5000i64..5000,
            cycles in 0i64..50,
            period in prop::sample::select(vec![5.0, 7.0, 100.0, 365.0]),
            kind in prop::sample::select(vec![TrigKind::Sin, TrigKind::Cos, TrigKind::AbsSin, TrigKind::AbsCos]),
            k in 1u32..4,
        ) {
            let spec = FourierTermSpec::new(period, kind).with_harmonic(k);
            let shifted = t + cycles * period as i64;
            prop_assert!((fourier_features(t, &spec) - fourier_features(shifted, &spec)).abs() <= 1e-12);
        }
    }
}
