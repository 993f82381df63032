//! Daily price and dispatch CSVs.
//!
//! ```text
//! day,price_usd_per_mwh          day,charge_mwh,discharge_mwh
//! 1,107.1                        1,12,10.8
//! 2,98.40                        2,12,10.8
//! ```
//!
//! Day indices are 1-based, contiguous and ascending. Numbers are plain decimals with `.` as the
//! separator; exponents and locale formats are rejected.
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::model::{parse_decimal, DispatchSchedule, Money};

pub const PRICE_HEADER: [&str; 2] = ["day", "price_usd_per_mwh"];
pub const SCHEDULE_HEADER: [&str; 3] = ["day", "charge_mwh", "discharge_mwh"];

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("header must be `{expected}` (found `{found}`)")]
    Header { expected: String, found: String },
    #[error("no data rows")]
    Empty,
}

fn malformed(line: u64, message: impl Into<String>) -> SeriesError {
    SeriesError::Malformed {
        line,
        message: message.into(),
    }
}

/// Parses the rows of a day-indexed CSV into `columns` decimal values per day.
fn parse_day_table(text: &str, header: &[&str]) -> Result<Vec<Vec<f64>>, SeriesError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());

    let found = reader
        .headers()
        .map_err(|e| malformed(1, e.to_string()))?
        .iter()
        .collect::<Vec<_>>();
    if found != header {
        return Err(SeriesError::Header {
            expected: header.join(","),
            found: found.join(","),
        });
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            malformed(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != header.len() {
            return Err(malformed(
                line,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        let expected_day = rows.len() + 1;
        let day: usize = record[0].parse().map_err(|_| {
            malformed(
                line,
                format!("day `{}` is not a positive integer", &record[0]),
            )
        })?;
        if day != expected_day {
            return Err(malformed(
                line,
                format!("day {day} out of sequence; expected day {expected_day}"),
            ));
        }
        let values = (1..header.len())
            .map(|i| {
                parse_decimal(&record[i])
                    .map_err(|e| malformed(line, format!("{}: {e}", header[i])))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(SeriesError::Empty);
    }
    Ok(rows)
}

/// Daily prices in day order. Range checks happen when the prices become a `PriceSeries`.
pub fn parse_price_csv(text: &str) -> Result<Vec<Money>, SeriesError> {
    Ok(parse_day_table(text, &PRICE_HEADER)?
        .into_iter()
        .map(|row| Money::new(row[0]))
        .collect())
}

pub fn parse_schedule_csv(text: &str) -> Result<DispatchSchedule, SeriesError> {
    let rows = parse_day_table(text, &SCHEDULE_HEADER)?;
    Ok(DispatchSchedule {
        daily_charge: rows.iter().map(|r| r[0]).collect(),
        daily_discharge: rows.iter().map(|r| r[1]).collect(),
    })
}

fn read(path: &Path) -> Result<String, SeriesError> {
    fs::read_to_string(path).map_err(|source| SeriesError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn read_price_csv(path: &Path) -> Result<Vec<Money>, SeriesError> {
    parse_price_csv(&read(path)?)
}

pub fn read_schedule_csv(path: &Path) -> Result<DispatchSchedule, SeriesError> {
    parse_schedule_csv(&read(path)?)
}

/// Writes prices at full precision (shortest decimal that reads back to the same value).
pub fn write_price_csv(prices: &[Money]) -> String {
    let mut out = PRICE_HEADER.join(",");
    out.push('\n');
    for (i, p) in prices.iter().enumerate() {
        let _ = writeln!(out, "{},{}", i + 1, p.usd());
    }
    out
}

pub fn write_schedule_csv(schedule: &DispatchSchedule) -> String {
    let mut out = SCHEDULE_HEADER.join(",");
    out.push('\n');
    for (i, (c, d)) in schedule
        .daily_charge
        .iter()
        .zip(&schedule.daily_discharge)
        .enumerate()
    {
        let _ = writeln!(out, "{},{},{}", i + 1, c, d);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_prices() {
        let p = parse_price_csv("day,price_usd_per_mwh\n1,107.1\n2, 98.40\n3,0\n").unwrap();
        assert_eq!(
            p,
            vec![Money::new(107.1), Money::new(98.4), Money::new(0.0)]
        );
    }

    #[test]
    fn header_required() {
        assert!(matches!(
            parse_price_csv("1,107.1\n2,100\n"),
            Err(SeriesError::Header { .. })
        ));
        assert!(matches!(
            parse_price_csv("day,price\n1,107.1\n"),
            Err(SeriesError::Header { .. })
        ));
    }

    #[test]
    fn days_must_be_contiguous() {
        let gap = parse_price_csv("day,price_usd_per_mwh\n1,1\n3,1\n").unwrap_err();
        assert!(gap.to_string().contains("line 3"), "{gap}");
        assert!(gap.to_string().contains("expected day 2"), "{gap}");
        assert!(parse_price_csv("day,price_usd_per_mwh\n1,1\n1,1\n").is_err());
        assert!(parse_price_csv("day,price_usd_per_mwh\n0,1\n").is_err());
        assert!(parse_price_csv("day,price_usd_per_mwh\n2,1\n1,1\n").is_err());
    }

    #[test]
    fn rejects_non_decimal_prices() {
        for bad in ["1e2", "NaN", "abc", ""] {
            let text = format!("day,price_usd_per_mwh\n1,{bad}\n");
            assert!(parse_price_csv(&text).is_err(), "{bad} accepted");
        }
        assert!(matches!(
            parse_price_csv("day,price_usd_per_mwh\n"),
            Err(SeriesError::Empty)
        ));
        assert!(parse_price_csv("day,price_usd_per_mwh\n1,2,3\n").is_err());
    }

    #[test]
    fn schedule_round_trip() {
        let s = DispatchSchedule {
            daily_charge: vec![12.0, 6.5, 0.0],
            daily_discharge: vec![10.8, 5.85, 0.0],
        };
        assert_eq!(parse_schedule_csv(&write_schedule_csv(&s)).unwrap(), s);
    }

    #[test]
    fn price_writer_is_lossless() {
        let prices = vec![Money::new(0.1 + 0.2), Money::new(107.1), Money::new(1e-7)];
        assert_eq!(parse_price_csv(&write_price_csv(&prices)).unwrap(), prices);
    }
}
