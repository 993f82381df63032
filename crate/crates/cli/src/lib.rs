//! `lcoe` command-line front end.
//!
//! [`run`] takes the argument list and output sinks so the whole command surface can be driven
//! from tests; `main` only wires it to the process.
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use lcoe_core::engine::{check_ratings, Formulation};
use lcoe_core::io::{
    load_scenario, write_parity, write_ranges, write_report, write_sweeps, OutputError,
    OutputFormat, Override, PriceInput, Report, Scenario, ScenarioError,
};
use lcoe_core::{
    canonical_schedule, grid_parity, lcoe_generation, lcoe_storage, lcoe_storage_simplified, sweep,
    technology_range, LcoeError, Money, SweepError, SweepParameter, SweepSpec, ValidationError,
};

#[derive(Debug, Parser)]
#[command(
    name = "lcoe",
    version,
    about = "Levelized cost of energy for generation assets and energy storage"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Levelized cost of the scenario's asset.
    Lcoe {
        /// Scenario file (`.toml` may be omitted).
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Force a formulation instead of choosing from the scenario contents.
        #[arg(long, value_enum)]
        formulation: Option<FormulationArg>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// One-parameter sensitivity sweep of the closed-form storage LCOE.
    Sweep {
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Sweep only this parameter; with --start/--stop/--steps, define the sweep ad hoc.
        #[arg(long)]
        parameter: Option<SweepParameter>,
        #[arg(long, requires_all = ["parameter", "stop", "steps"], allow_hyphen_values = true)]
        start: Option<f64>,
        #[arg(long, requires_all = ["parameter", "start", "steps"], allow_hyphen_values = true)]
        stop: Option<f64>,
        #[arg(long, requires_all = ["parameter", "start", "stop"])]
        steps: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Min/avg/max LCOE of every technology in the scenario.
    Compare {
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Compare an LCOE with the utility rate.
    Parity {
        /// Scenario whose LCOE is compared; omit when passing --lcoe.
        #[arg(required_unless_present = "lcoe", conflicts_with = "lcoe")]
        scenario: Option<PathBuf>,
        /// LCOE in USD/MWh.
        #[arg(long)]
        lcoe: Option<Money>,
        /// Utility rate in USD/MWh; defaults to the scenario's (average) price.
        #[arg(long)]
        rate: Option<Money>,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        formulation: Option<FormulationArg>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Override a scenario key after parsing, e.g. `--set charging_hours=6`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<Override>,
    /// Write the document to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormulationArg {
    Eq1,
    Eq2,
    Eq3,
}

impl From<FormulationArg> for Formulation {
    fn from(f: FormulationArg) -> Self {
        match f {
            FormulationArg::Eq1 => Formulation::Generation,
            FormulationArg::Eq2 => Formulation::StorageSchedule,
            FormulationArg::Eq3 => Formulation::StorageSimplified,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
    #[value(alias = "plot-data")]
    Plot,
}

impl Format {
    fn document(self) -> OutputFormat {
        match self {
            Format::Text | Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
            Format::Plot => OutputFormat::PlotData,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Lcoe(#[from] LcoeError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error("{formulation} cannot be applied: {reason}")]
    Formulation {
        formulation: Formulation,
        reason: &'static str,
    },
    #[error("{0}")]
    Missing(String),
    #[error("{path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Runs one invocation. Returns the process exit code: 0 on success, 1 for domain and validation
/// errors, 2 for usage errors.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok((document, None)) => match stdout.write_all(document.as_bytes()) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                1
            }
        },
        Ok((document, Some(path))) => match fs::write(&path, document) {
            Ok(()) => 0,
            Err(source) => {
                let _ = writeln!(stderr, "error: {}", CliError::Write { path, source });
                1
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

fn execute(command: Command) -> Result<(String, Option<PathBuf>), CliError> {
    match command {
        Command::Lcoe {
            scenario,
            common,
            formulation,
            format,
        } => {
            let s = load_scenario(&scenario, &common.overrides)?;
            let report = evaluate(&s, formulation.map(Into::into))?;
            let doc = match format {
                Format::Text => report_text(&report),
                f => write_report(&report, f.document())?,
            };
            Ok((doc, common.out))
        }
        Command::Sweep {
            scenario,
            common,
            parameter,
            start,
            stop,
            steps,
            format,
        } => {
            let s = load_scenario(&scenario, &common.overrides)?;
            let specs = sweep_specs(&s, &scenario, parameter, start.zip(stop).zip(steps))?;
            let tables = specs.iter().map(sweep).collect::<Result<Vec<_>, _>>()?;
            Ok((write_sweeps(&tables, format.document()), common.out))
        }
        Command::Compare {
            scenario,
            common,
            format,
        } => {
            let s = load_scenario(&scenario, &common.overrides)?;
            if s.technologies.is_empty() {
                return Err(CliError::Missing(format!(
                    "{} defines no [[technology]] entries",
                    scenario.display()
                )));
            }
            let ranges = s
                .technologies
                .iter()
                .map(technology_range)
                .collect::<Result<Vec<_>, _>>()?;
            let doc = match format {
                Format::Text => ranges_text(&ranges),
                f => write_ranges(&ranges, f.document()),
            };
            Ok((doc, common.out))
        }
        Command::Parity {
            scenario,
            lcoe,
            rate,
            common,
            formulation,
            format,
        } => {
            let (lcoe, scenario_rate) = match (lcoe, scenario) {
                (Some(lcoe), _) => (lcoe, None),
                (None, Some(path)) => {
                    let s = load_scenario(&path, &common.overrides)?;
                    let report = evaluate(&s, formulation.map(Into::into))?;
                    (report.result.lcoe, s.average_price())
                }
                (None, None) => unreachable!("clap requires a scenario or --lcoe"),
            };
            let rate = rate.or(scenario_rate).ok_or_else(|| {
                CliError::Missing("utility rate missing: pass --rate <USD/MWh>".into())
            })?;
            let verdict = grid_parity(lcoe, rate)?;
            let doc = match format {
                Format::Text => format!(
                    "lcoe={} reference_rate={} at_parity={} margin={}\n",
                    verdict.lcoe, verdict.reference_rate, verdict.at_parity, verdict.margin
                ),
                f => write_parity(&verdict, f.document())?,
            };
            Ok((doc, common.out))
        }
    }
}

/// Generation scenarios use the discounted lifetime formula. Storage scenarios use the explicit
/// schedule formula when they carry a schedule or a daily price series, and the closed form when
/// they carry a single price.
fn auto_formulation(s: &Scenario) -> Formulation {
    match (s.storage(), &s.price, &s.schedule) {
        (None, _, _) => Formulation::Generation,
        (Some(_), Some(PriceInput::Series(_)), _) | (Some(_), _, Some(_)) => {
            Formulation::StorageSchedule
        }
        (Some(_), _, None) => Formulation::StorageSimplified,
    }
}

fn evaluate(s: &Scenario, forced: Option<Formulation>) -> Result<Report, CliError> {
    let formulation = forced.unwrap_or_else(|| auto_formulation(s));
    let mismatch = |reason| CliError::Formulation {
        formulation,
        reason,
    };
    let missing_price = || CliError::Missing("storage LCOE needs a price under [price]".into());
    let result = match formulation {
        Formulation::Generation => {
            let asset = s
                .generation()
                .ok_or_else(|| mismatch("the scenario has no [generation] asset"))?;
            lcoe_generation(asset)?
        }
        Formulation::StorageSchedule => {
            let asset = s
                .storage()
                .ok_or_else(|| mismatch("the scenario has no [storage] asset"))?;
            let prices = s.price_series().ok_or_else(missing_price)?;
            let schedule = match &s.schedule {
                Some(schedule) => schedule.clone(),
                None => canonical_schedule(asset, prices.len())?,
            };
            lcoe_storage(asset, &prices, &schedule)?
        }
        Formulation::StorageSimplified => {
            let asset = s
                .storage()
                .ok_or_else(|| mismatch("the scenario has no [storage] asset"))?;
            if s.schedule.is_some() {
                return Err(mismatch(
                    "the closed form assumes full daily cycling; drop [schedule] or use eq2",
                ));
            }
            check_ratings(asset)?;
            let price = s.average_price().ok_or_else(missing_price)?;
            lcoe_storage_simplified(asset, price, s.days_per_year)?
        }
    };
    Ok(Report {
        formulation,
        result,
    })
}

fn sweep_specs(
    s: &Scenario,
    path: &Path,
    parameter: Option<SweepParameter>,
    ad_hoc: Option<((f64, f64), usize)>,
) -> Result<Vec<SweepSpec>, CliError> {
    match (parameter, ad_hoc) {
        (Some(parameter), Some(((start, stop), steps))) => {
            let base_asset = s
                .storage()
                .ok_or_else(|| CliError::Missing("sweeps need a [storage] asset".into()))?
                .clone();
            let base_price = s
                .average_price()
                .ok_or_else(|| CliError::Missing("sweeps need a price under [price]".into()))?;
            Ok(vec![SweepSpec {
                parameter,
                start,
                stop,
                steps,
                base_asset,
                base_price,
                days: s.days_per_year,
            }])
        }
        (filter, _) => {
            let specs: Vec<SweepSpec> = s
                .sweeps
                .iter()
                .filter(|spec| filter.is_none_or(|p| spec.parameter == p))
                .cloned()
                .collect();
            if specs.is_empty() {
                let what = filter.map_or("[[sweep]] entries".to_owned(), |p| {
                    format!("a [[sweep]] over {p}")
                });
                return Err(CliError::Missing(format!(
                    "{} defines no {what}; pass --parameter with --start/--stop/--steps",
                    path.display()
                )));
            }
            Ok(specs)
        }
    }
}

fn report_text(report: &Report) -> String {
    let r = &report.result;
    let rows = [
        ("formulation", report.formulation.to_string()),
        ("lcoe_usd_per_mwh", r.lcoe.to_string()),
        ("capital_cost_usd", r.capital_cost_component.to_string()),
        ("operating_cost_usd", r.operating_cost_component.to_string()),
        (
            "total_energy_mwh",
            lcoe_core::io::format_sig6(r.total_energy),
        ),
    ];
    let mut out = String::new();
    for (k, v) in rows {
        let _ = writeln!(out, "{k:<20}{v}");
    }
    out
}

fn ranges_text(ranges: &[lcoe_core::TechnologyRange]) -> String {
    let width = ranges
        .iter()
        .map(|r| r.technology_name.len())
        .chain([10])
        .max()
        .unwrap_or(10)
        + 2;
    let mut out = format!(
        "{:<width$}{:>12}{:>12}{:>12}\n",
        "technology", "min", "avg", "max"
    );
    for r in ranges {
        let _ = writeln!(
            out,
            "{:<width$}{:>12}{:>12}{:>12}",
            r.technology_name,
            r.min_lcoe.to_string(),
            r.avg_lcoe.to_string(),
            r.max_lcoe.to_string()
        );
    }
    out.push_str("(USD/MWh)\n");
    out
}
