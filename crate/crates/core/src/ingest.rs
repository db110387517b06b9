//! CSV ingestion of daily AQI or category files, and CSV renderings of the descriptive outputs.

use std::io::{Read, Write};

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::series::{CategoryScheme, OrdinalSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueColumn {
    Aqi,
    Category,
}

/// Parse a `date,aqi` or `date,category` CSV. Extra columns are ignored.
///
/// Every malformed row is collected, and the error lists their 1-based line numbers.
pub fn read_series_csv<R: Read>(reader: R, scheme: &CategoryScheme) -> Result<OrdinalSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim_start_matches('\u{feff}').eq_ignore_ascii_case(name))
    };
    let date_col = find("date").ok_or_else(|| Error::Malformed {
        lines: vec![1],
        message: "header has no `date` column".into(),
    })?;
    let (value_col, kind) = match (find("aqi"), find("category")) {
        (Some(c), _) => (c, ValueColumn::Aqi),
        (None, Some(c)) => (c, ValueColumn::Category),
        (None, None) => {
            return Err(Error::Malformed {
                lines: vec![1],
                message: "header needs an `aqi` or `category` column".into(),
            })
        }
    };

    let mut dates = Vec::new();
    let mut codes = Vec::new();
    let mut bad = Vec::new();
    let mut reasons = Vec::new();
    let k = scheme.n_categories();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                bad.push(line);
                reasons.push(e.to_string());
                continue;
            }
        };
        let date = rec.get(date_col).and_then(parse_date);
        let code = rec.get(value_col).and_then(|v| match kind {
            ValueColumn::Aqi => v
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite() && *x >= 0.0)
                .map(|x| scheme.categorize(x)),
            ValueColumn::Category => v.parse::<usize>().ok().filter(|c| *c < k),
        });
        match (date, code) {
            (Some(d), Some(c)) => {
                if dates.last().is_some_and(|prev| d <= *prev) {
                    bad.push(line);
                    reasons.push(format!("date {d} not after previous row"));
                    continue;
                }
                dates.push(d);
                codes.push(c);
            }
            _ => {
                bad.push(line);
                reasons.push("unparseable date or value".into());
            }
        }
    }
    if !bad.is_empty() {
        reasons.dedup();
        return Err(Error::Malformed { lines: bad, message: reasons.join("; ") });
    }
    OrdinalSeries::new(dates, codes, scheme.clone())
}

fn parse_date(s: &str) -> Option<NaiveDate> {
    ["%Y-%m-%d", "%d-%m-%Y", "%d/%m/%Y"]
        .iter()
        .find_map(|f| NaiveDate::parse_from_str(s, f).ok())
}

pub fn write_series_csv<W: Write>(series: &OrdinalSeries, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "category", "label"])?;
    for (d, &c) in series.dates().iter().zip(series.codes()) {
        w.write_record([d.to_string(), c.to_string(), series.scheme().label(c).unwrap_or("").into()])?;
    }
    w.flush()?;
    Ok(())
}

/// A labelled matrix as CSV: first column holds `row_labels`, header holds `col_labels`.
pub fn write_matrix_csv<W: Write, T: ToString>(
    out: W,
    corner: &str,
    row_labels: &[String],
    col_labels: &[String],
    rows: &[Vec<T>],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![corner.to_string()];
    header.extend(col_labels.iter().cloned());
    w.write_record(&header)?;
    for (label, row) in row_labels.iter().zip(rows) {
        let mut rec = vec![label.clone()];
        rec.extend(row.iter().map(ToString::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
