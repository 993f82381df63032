//! Serialization of results, sweep tables, technology ranges and parity verdicts.
//!
//! * CSV is for people and spreadsheets: money to the cent, other numbers to 6 significant
//!   digits, units in the column or quantity names.
//! * JSON is the lossless interchange form: numbers carry full precision and parse back exactly.
//! * Plot data is whitespace-separated columns with `#` comment headers.
//!
//! Every writer is deterministic: fixed key order, fixed number formatting, `\n` line endings.
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{Formulation, ParityVerdict};
use crate::model::{LcoeResult, SweepTable, TechnologyRange, Validate, ValidationError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    PlotData,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "plot" | "plot-data" => Ok(OutputFormat::PlotData),
            other => Err(format!(
                "unknown output format `{other}` (csv, json, plot-data)"
            )),
        }
    }
}

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("{0} has no plot-data form; use csv or json")]
    NotPlottable(&'static str),
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

/// An LCOE result tagged with the formula that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub formulation: Formulation,
    pub result: LcoeResult,
}

/// Rounds to 6 significant digits and prints the shortest plain decimal for the rounded value.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let rounded: f64 = format!("{x:.5e}").parse().unwrap_or(x);
    rounded.to_string()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data always serializes");
    s.push('\n');
    s
}

pub fn write_report(report: &Report, format: OutputFormat) -> Result<String, OutputError> {
    let r = &report.result;
    match format {
        OutputFormat::Csv => Ok(format!(
            "quantity,value\nformulation,{}\nlcoe_usd_per_mwh,{}\ncapital_cost_usd,{}\noperating_cost_usd,{}\ntotal_energy_mwh,{}\n",
            report.formulation,
            r.lcoe,
            r.capital_cost_component,
            r.operating_cost_component,
            format_sig6(r.total_energy),
        )),
        OutputFormat::Json => Ok(json(report)),
        OutputFormat::PlotData => Err(OutputError::NotPlottable("an LCOE result")),
    }
}

/// Multiple tables are separated by a blank line (CSV) or two blank lines (plot data, so each
/// table is its own gnuplot data block). JSON is always an array.
pub fn write_sweeps(tables: &[SweepTable], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json(&tables),
        OutputFormat::Csv => tables
            .iter()
            .map(|t| {
                let mut out = format!("{},lcoe_usd_per_mwh\n", t.parameter.column());
                for p in &t.points {
                    let _ = writeln!(out, "{},{}", format_sig6(p.value), p.lcoe);
                }
                out
            })
            .collect::<Vec<_>>()
            .join("\n"),
        OutputFormat::PlotData => tables
            .iter()
            .map(|t| {
                let mut out = format!("# {} lcoe_usd_per_mwh\n", t.parameter.column());
                for p in &t.points {
                    let _ = writeln!(out, "{} {}", format_sig6(p.value), p.lcoe);
                }
                out
            })
            .collect::<Vec<_>>()
            .join("\n\n"),
    }
}

/// Plot data uses the `x y ylow yhigh` layout: technology index, average, minimum, maximum.
pub fn write_ranges(ranges: &[TechnologyRange], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json(&ranges),
        OutputFormat::Csv => {
            let mut out = String::from(
                "technology,min_lcoe_usd_per_mwh,avg_lcoe_usd_per_mwh,max_lcoe_usd_per_mwh\n",
            );
            for r in ranges {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    csv_field(&r.technology_name),
                    r.min_lcoe,
                    r.avg_lcoe,
                    r.max_lcoe
                );
            }
            out
        }
        OutputFormat::PlotData => {
            let mut out = String::from(
                "# index avg_lcoe_usd_per_mwh min_lcoe_usd_per_mwh max_lcoe_usd_per_mwh\n",
            );
            for (i, r) in ranges.iter().enumerate() {
                let _ = writeln!(out, "# {}: {}", i + 1, r.technology_name);
                let _ = writeln!(
                    out,
                    "{} {} {} {}",
                    i + 1,
                    r.avg_lcoe,
                    r.min_lcoe,
                    r.max_lcoe
                );
            }
            out
        }
    }
}

pub fn write_parity(verdict: &ParityVerdict, format: OutputFormat) -> Result<String, OutputError> {
    match format {
        OutputFormat::Csv => Ok(format!(
            "quantity,value\nlcoe_usd_per_mwh,{}\nreference_rate_usd_per_mwh,{}\nat_parity,{}\nmargin_usd_per_mwh,{}\n",
            verdict.lcoe, verdict.reference_rate, verdict.at_parity, verdict.margin
        )),
        OutputFormat::Json => Ok(json(verdict)),
        OutputFormat::PlotData => Err(OutputError::NotPlottable("a parity verdict")),
    }
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, OutputError> {
    serde_json::from_str(text).map_err(|e| OutputError::Json(e.to_string()))
}

pub fn parse_report_json(text: &str) -> Result<Report, OutputError> {
    let report: Report = from_json(text)?;
    report.result.check()?;
    Ok(report)
}

pub fn parse_sweeps_json(text: &str) -> Result<Vec<SweepTable>, OutputError> {
    let tables: Vec<SweepTable> = from_json(text)?;
    for t in &tables {
        t.check()?;
    }
    Ok(tables)
}

pub fn parse_ranges_json(text: &str) -> Result<Vec<TechnologyRange>, OutputError> {
    let ranges: Vec<TechnologyRange> = from_json(text)?;
    for r in &ranges {
        r.check()?;
    }
    Ok(ranges)
}
