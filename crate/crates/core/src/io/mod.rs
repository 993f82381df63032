//! Scenario files, price and schedule CSVs, and result serialization.
//!
//! All parsing and rendering works on strings; file-system access is limited to the thin
//! `load_*`/`read_*` wrappers.
mod output;
mod scenario;
mod series;

pub use output::{
    format_sig6, parse_ranges_json, parse_report_json, parse_sweeps_json, write_parity,
    write_ranges, write_report, write_sweeps, OutputError, OutputFormat, Report,
};
pub use scenario::{
    load_scenario, parse_scenario, write_scenario, Asset, Override, PriceInput, Scenario,
    ScenarioError,
};
pub use series::{
    parse_price_csv, parse_schedule_csv, read_price_csv, read_schedule_csv, write_price_csv,
    write_schedule_csv, SeriesError,
};
