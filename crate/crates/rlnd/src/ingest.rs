//! Price-series ingestion: CSV reading, log returns, date filtering,
//! and the one-value-per-line returns file format.

use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;

use crate::{Error, Result};

/// Cleaned log-return observations with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    pub values: Vec<f64>,
    pub source_label: String,
    pub date_range: Option<(NaiveDate, NaiveDate)>,
}

impl ReturnSeries {
    pub fn n(&self) -> usize {
        self.values.len()
    }
}

/// One daily close.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceRecord {
    pub date: NaiveDate,
    pub close: f64,
}

fn parse_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .or_else(|_| NaiveDate::parse_from_str(s, "%m/%d/%Y"))
        .ok()
}

/// Read a delimiter-separated price file with a header row.
///
/// Records come back sorted ascending by date; duplicate dates and
/// non-positive or unparseable prices are rejected with the offending
/// row number.
pub fn read_price_csv(
    path: &Path,
    date_column: &str,
    price_column: &str,
) -> Result<Vec<PriceRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("cannot open {}: {e}", path.display()),
            )),
            _ => Error::Parse {
                line: 1,
                message: e.to_string(),
            },
        })?;

    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let col = |name: &str| {
        headers.iter().position(|h| h.trim() == name).ok_or_else(|| Error::Parse {
            line: 1,
            message: format!("column `{name}` not found in header {headers:?}"),
        })
    };
    let date_idx = col(date_column)?;
    let price_idx = col(price_column)?;

    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let line = i + 2; // header is line 1
        let row = row.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let date_str = row.get(date_idx).unwrap_or("").trim();
        let date = parse_date(date_str).ok_or_else(|| Error::Parse {
            line,
            message: format!("unparseable date `{date_str}`"),
        })?;
        let price_str = row.get(price_idx).unwrap_or("").trim();
        let close: f64 = price_str.parse().map_err(|_| Error::Parse {
            line,
            message: format!("unparseable price `{price_str}`"),
        })?;
        if !(close > 0.0) || !close.is_finite() {
            return Err(Error::Parse {
                line,
                message: format!("non-positive price {close}"),
            });
        }
        records.push(PriceRecord { date, close });
    }

    records.sort_by_key(|r| r.date);
    for w in records.windows(2) {
        if w[0].date == w[1].date {
            return Err(Error::Parse {
                line: 0,
                message: format!("duplicate date {}", w[0].date),
            });
        }
    }
    Ok(records)
}

/// Log returns between consecutive available records.
pub fn log_returns(prices: &[PriceRecord], source_label: &str) -> Result<ReturnSeries> {
    if prices.len() < 2 {
        return Err(Error::DegenerateData(format!(
            "need at least 2 price records, got {}",
            prices.len()
        )));
    }
    let values = prices
        .windows(2)
        .map(|w| (w[1].close / w[0].close).ln())
        .collect();
    Ok(ReturnSeries {
        values,
        source_label: source_label.to_string(),
        date_range: Some((prices[0].date, prices[prices.len() - 1].date)),
    })
}

/// Inclusive date filter; order preserved. An empty result is not an
/// error, callers may warn.
pub fn filter_range(prices: &[PriceRecord], start: NaiveDate, end: NaiveDate) -> Vec<PriceRecord> {
    prices
        .iter()
        .copied()
        .filter(|r| r.date >= start && r.date <= end)
        .collect()
}

/// Write the one-value-per-line returns format with a `# source:` header.
pub fn write_returns(series: &ReturnSeries, path: &Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "# source: {}", series.source_label)?;
    if let Some((start, end)) = series.date_range {
        writeln!(f, "# dates: {start} {end}")?;
    }
    for v in &series.values {
        writeln!(f, "{v:.16e}")?;
    }
    Ok(())
}

/// Read the returns file format.
pub fn read_returns(path: &Path) -> Result<ReturnSeries> {
    let text = std::fs::read_to_string(path)?;
    let mut values = Vec::new();
    let mut source_label = path.display().to_string();
    let mut date_range = None;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(src) = rest.strip_prefix("source:") {
                source_label = src.trim().to_string();
            } else if let Some(dates) = rest.strip_prefix("dates:") {
                let mut it = dates.split_whitespace();
                if let (Some(a), Some(b)) = (it.next(), it.next()) {
                    if let (Some(a), Some(b)) = (parse_date(a), parse_date(b)) {
                        date_range = Some((a, b));
                    }
                }
            }
            continue;
        }
        let v: f64 = line.parse().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("unparseable return `{line}`"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("non-finite return {v}"),
            });
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::EmptyData);
    }
    Ok(ReturnSeries {
        values,
        source_label,
        date_range,
    })
}
