//! Scenario files.
//!
//! A scenario is a TOML document. It holds exactly one asset table, `[generation]` or
//! `[storage]`, whose keys are the field names of [`GenerationAsset`] / [`StorageAsset`].
//! Optional sections:
//!
//! ```toml
//! [price]                      # exactly one of the first three keys
//! price_usd_per_mwh = 107.1    # flat price, USD/MWh
//! daily_price = [100.0, 50.0]  # inline daily series, USD/MWh
//! series_csv = "prices.csv"    # daily series file, relative to the scenario
//! days_per_year = 365          # default 365; must match the series length
//!
//! [schedule]                   # explicit dispatch, MWh per day
//! schedule_csv = "dispatch.csv"            # or daily_charge = [..] plus daily_discharge = [..]
//!
//! [[sweep]]
//! parameter = "efficiency"     # charging_hours | price | efficiency | energy_to_power_cost_ratio
//! start = 0.6
//! stop = 1.0
//! steps = 9
//!
//! [[technology]]
//! name = "lead-acid"
//! annualized_power_cost = { min = 20000, max = 40000 }   # a bare number is a fixed value
//! annualized_energy_cost = { min = 10000, max = 30000 }
//! roundtrip_efficiency = { min = 0.70, max = 0.90 }
//! charging_hours = 12
//! price_usd_per_mwh = 107.1    # optional, defaults to the scenario price
//! days_per_year = 365          # optional, defaults to the scenario year
//! ```
//!
//! Money values may be written as TOML numbers or as decimal strings (`"107.10"`). Unknown keys
//! and missing required keys are errors that name the key.
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::series::{read_price_csv, read_schedule_csv, SeriesError};
use crate::model::{
    non_negative, DispatchSchedule, GenerationAsset, Money, PriceSeries, StorageAsset,
    SweepParameter, Validate, ValidationError, DEFAULT_DAYS_PER_YEAR,
};
use crate::sensitivity::{technology_range, ParamRange, SweepError, SweepSpec, TechnologySpec};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("scenario must contain exactly one of [generation] or [storage]")]
    AssetChoice,
    #[error("[price] must set exactly one of price_usd_per_mwh, daily_price or series_csv")]
    PriceChoice,
    #[error("[schedule] must set either schedule_csv or both daily_charge and daily_discharge")]
    ScheduleChoice,
    #[error(
        "{what} needs a price: set price_usd_per_mwh, daily_price or series_csv under [price]"
    )]
    MissingPrice { what: String },
    #[error("{what} needs a [storage] asset")]
    NeedsStorage { what: String },
    #[error("override `{0}` must have the form key=value")]
    MalformedOverride(String),
    #[error("unknown override key `{0}`")]
    UnknownOverride(String),
    #[error("[{section}] {source}")]
    Invalid {
        section: &'static str,
        source: ValidationError,
    },
    #[error("{path}: {source}")]
    Series { path: PathBuf, source: SeriesError },
    #[error(transparent)]
    Sweep(#[from] SweepError),
}

fn invalid(section: &'static str) -> impl Fn(ValidationError) -> ScenarioError {
    move |source| ScenarioError::Invalid { section, source }
}

/// A `--set key=value` style override. `key` is either a bare field name (`charging_hours`), a
/// dotted path (`storage.charging_hours`), or a path into an array with a 1-based index
/// (`sweep.2.steps`). `value` is read as a TOML value, falling back to a plain string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Override {
    pub key: String,
    pub value: String,
}

impl FromStr for Override {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() => Ok(Override {
                key: k.trim().to_owned(),
                value: v.trim().to_owned(),
            }),
            _ => Err(ScenarioError::MalformedOverride(s.to_owned())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Asset {
    Generation(GenerationAsset),
    Storage(StorageAsset),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PriceInput {
    Flat(Money),
    Series(PriceSeries),
}

/// A fully validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub asset: Asset,
    pub price: Option<PriceInput>,
    pub days_per_year: usize,
    pub schedule: Option<DispatchSchedule>,
    pub sweeps: Vec<SweepSpec>,
    pub technologies: Vec<TechnologySpec>,
}

impl Scenario {
    pub fn storage(&self) -> Option<&StorageAsset> {
        match &self.asset {
            Asset::Storage(s) => Some(s),
            Asset::Generation(_) => None,
        }
    }

    pub fn generation(&self) -> Option<&GenerationAsset> {
        match &self.asset {
            Asset::Generation(g) => Some(g),
            Asset::Storage(_) => None,
        }
    }

    /// The flat price, or the mean of the daily series.
    pub fn average_price(&self) -> Option<Money> {
        match &self.price {
            Some(PriceInput::Flat(p)) => Some(*p),
            Some(PriceInput::Series(s)) => Some(s.average()),
            None => None,
        }
    }

    /// The daily series, expanding a flat price over the scenario year.
    pub fn price_series(&self) -> Option<PriceSeries> {
        match &self.price {
            Some(PriceInput::Flat(p)) => Some(PriceSeries::flat(*p, self.days_per_year)),
            Some(PriceInput::Series(s)) => Some(s.clone()),
            None => None,
        }
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    generation: Option<GenerationAsset>,
    #[serde(skip_serializing_if = "Option::is_none")]
    storage: Option<StorageAsset>,
    #[serde(skip_serializing_if = "Option::is_none")]
    price: Option<PriceSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    schedule: Option<ScheduleSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    sweep: Vec<SweepEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    technology: Vec<TechnologyEntry>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PriceSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    price_usd_per_mwh: Option<Money>,
    #[serde(skip_serializing_if = "Option::is_none")]
    daily_price: Option<Vec<Money>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    series_csv: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    days_per_year: Option<usize>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    daily_charge: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    daily_discharge: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    schedule_csv: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepEntry {
    parameter: SweepParameter,
    start: f64,
    stop: f64,
    steps: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TechnologyEntry {
    name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    price_usd_per_mwh: Option<Money>,
    #[serde(skip_serializing_if = "Option::is_none")]
    days_per_year: Option<usize>,
    annualized_power_cost: ParamRange,
    annualized_energy_cost: ParamRange,
    roundtrip_efficiency: ParamRange,
    charging_hours: ParamRange,
}

/// Section that owns each bare override key.
fn section_of(key: &str) -> Option<&'static str> {
    Some(match key {
        "investment_cost"
        | "fixed_om_per_year"
        | "variable_om_per_mwh"
        | "fuel_cost_per_mwh"
        | "annual_energy"
        | "lifetime_years"
        | "discount_rate" => "generation",
        "annualized_power_cost"
        | "annualized_energy_cost"
        | "rated_power"
        | "rated_energy"
        | "roundtrip_efficiency"
        | "charging_hours" => "storage",
        "price_usd_per_mwh" | "daily_price" | "series_csv" | "days_per_year" => "price",
        "daily_charge" | "daily_discharge" | "schedule_csv" => "schedule",
        _ => return None,
    })
}

const PRICE_FORMS: [&str; 3] = ["price_usd_per_mwh", "daily_price", "series_csv"];

fn override_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_owned()))
}

fn apply_override(doc: &mut toml::Table, ov: &Override) -> Result<(), ScenarioError> {
    let unknown = || ScenarioError::UnknownOverride(ov.key.clone());
    let mut path: Vec<&str> = ov.key.split('.').collect();
    if path.len() == 1 {
        path.insert(0, section_of(&ov.key).ok_or_else(unknown)?);
    }
    let (leaf, parents) = path.split_last().ok_or_else(unknown)?;

    let mut table = doc;
    let mut i = 0;
    while i < parents.len() {
        if parents[i].parse::<usize>().is_ok() {
            return Err(unknown());
        }
        let slot = table
            .entry(parents[i].to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = match slot {
            toml::Value::Table(t) => {
                i += 1;
                t
            }
            toml::Value::Array(items) => {
                // Arrays of tables are addressed by a 1-based index segment.
                let idx = parents
                    .get(i + 1)
                    .and_then(|s| s.parse::<usize>().ok())
                    .filter(|&n| n >= 1 && n <= items.len())
                    .ok_or_else(unknown)?;
                i += 2;
                match &mut items[idx - 1] {
                    toml::Value::Table(t) => t,
                    _ => return Err(unknown()),
                }
            }
            _ => return Err(unknown()),
        };
    }
    if parents.first() == Some(&"price") && PRICE_FORMS.contains(leaf) {
        for form in PRICE_FORMS {
            table.remove(form);
        }
    }
    table.insert(leaf.to_string(), override_value(&ov.value));
    Ok(())
}

/// Parses and validates a scenario. Relative CSV paths resolve against `base_dir`.
pub fn parse_scenario(
    text: &str,
    base_dir: &Path,
    origin: &str,
    overrides: &[Override],
) -> Result<Scenario, ScenarioError> {
    let parse_err = |e: toml::de::Error| ScenarioError::Parse {
        origin: origin.to_owned(),
        message: e.to_string().trim_end().to_owned(),
    };
    let doc: ScenarioDoc = if overrides.is_empty() {
        toml::from_str(text).map_err(parse_err)?
    } else {
        let mut table: toml::Table = text.parse().map_err(parse_err)?;
        for ov in overrides {
            apply_override(&mut table, ov)?;
        }
        toml::Value::Table(table).try_into().map_err(parse_err)?
    };
    resolve(doc, base_dir)
}

/// Reads a scenario file. A path without extension that does not exist is retried with `.toml`.
pub fn load_scenario(path: &Path, overrides: &[Override]) -> Result<Scenario, ScenarioError> {
    let path = if !path.exists() && path.extension().is_none() {
        path.with_extension("toml")
    } else {
        path.to_owned()
    };
    let text = fs::read_to_string(&path).map_err(|source| ScenarioError::Io {
        path: path.clone(),
        source,
    })?;
    let base_dir = path.parent().unwrap_or_else(|| Path::new("."));
    parse_scenario(&text, base_dir, &path.display().to_string(), overrides)
}

fn resolve(doc: ScenarioDoc, base_dir: &Path) -> Result<Scenario, ScenarioError> {
    let asset = match (doc.generation, doc.storage) {
        (Some(g), None) => Asset::Generation(g.validate().map_err(invalid("generation"))?),
        (None, Some(s)) => Asset::Storage(s.validate().map_err(invalid("storage"))?),
        _ => return Err(ScenarioError::AssetChoice),
    };

    let days_per_year = doc
        .price
        .as_ref()
        .and_then(|p| p.days_per_year)
        .unwrap_or(DEFAULT_DAYS_PER_YEAR);
    if days_per_year == 0 {
        return Err(invalid("price")(ValidationError::ZeroDays));
    }

    let price = match doc.price {
        None => None,
        Some(section) => Some(resolve_price(section, days_per_year, base_dir)?),
    };

    let mut scenario = Scenario {
        asset,
        price,
        days_per_year,
        schedule: None,
        sweeps: Vec::new(),
        technologies: Vec::new(),
    };

    if let Some(section) = doc.schedule {
        let schedule = match section {
            ScheduleSection {
                schedule_csv: Some(file),
                daily_charge: None,
                daily_discharge: None,
            } => {
                let path = base_dir.join(file);
                read_schedule_csv(&path).map_err(|source| ScenarioError::Series { path, source })?
            }
            ScheduleSection {
                schedule_csv: None,
                daily_charge: Some(daily_charge),
                daily_discharge: Some(daily_discharge),
            } => DispatchSchedule {
                daily_charge,
                daily_discharge,
            },
            _ => return Err(ScenarioError::ScheduleChoice),
        };
        let storage = scenario
            .storage()
            .ok_or_else(|| ScenarioError::NeedsStorage {
                what: "[schedule]".into(),
            })?;
        let prices = scenario
            .price_series()
            .ok_or_else(|| ScenarioError::MissingPrice {
                what: "[schedule]".into(),
            })?;
        schedule
            .check_against(storage, &prices)
            .map_err(invalid("schedule"))?;
        scenario.schedule = Some(schedule);
    }

    for (i, entry) in doc.sweep.into_iter().enumerate() {
        let what = || format!("sweep {} ({})", i + 1, entry.parameter);
        let base_asset = scenario
            .storage()
            .ok_or_else(|| ScenarioError::NeedsStorage { what: what() })?
            .clone();
        let base_price = scenario
            .average_price()
            .ok_or_else(|| ScenarioError::MissingPrice { what: what() })?;
        let spec = SweepSpec {
            parameter: entry.parameter,
            start: entry.start,
            stop: entry.stop,
            steps: entry.steps,
            base_asset,
            base_price,
            days: days_per_year,
        };
        crate::sensitivity::sweep(&spec)?;
        scenario.sweeps.push(spec);
    }

    for entry in doc.technology {
        let price = entry
            .price_usd_per_mwh
            .or_else(|| scenario.average_price())
            .ok_or_else(|| ScenarioError::MissingPrice {
                what: format!("technology {}", entry.name),
            })?;
        let spec = TechnologySpec {
            name: entry.name,
            annualized_power_cost: entry.annualized_power_cost,
            annualized_energy_cost: entry.annualized_energy_cost,
            roundtrip_efficiency: entry.roundtrip_efficiency,
            charging_hours: entry.charging_hours,
            price,
            days: entry.days_per_year.unwrap_or(days_per_year),
        };
        technology_range(&spec)?;
        scenario.technologies.push(spec);
    }

    Ok(scenario)
}

fn resolve_price(
    section: PriceSection,
    days_per_year: usize,
    base_dir: &Path,
) -> Result<PriceInput, ScenarioError> {
    let series = |daily_price| {
        PriceSeries {
            daily_price,
            days_per_year,
        }
        .validate()
        .map(PriceInput::Series)
        .map_err(invalid("price"))
    };
    match (
        section.price_usd_per_mwh,
        section.daily_price,
        section.series_csv,
    ) {
        (Some(flat), None, None) => {
            non_negative("price_usd_per_mwh", flat.usd()).map_err(invalid("price"))?;
            Ok(PriceInput::Flat(flat))
        }
        (None, Some(daily), None) => series(daily),
        (None, None, Some(file)) => {
            let path = base_dir.join(file);
            let daily =
                read_price_csv(&path).map_err(|source| ScenarioError::Series { path, source })?;
            series(daily)
        }
        _ => Err(ScenarioError::PriceChoice),
    }
}

/// Renders a scenario back to TOML. Series and schedules are written inline, so the output is
/// self-contained.
pub fn write_scenario(scenario: &Scenario) -> String {
    let (generation, storage) = match &scenario.asset {
        Asset::Generation(g) => (Some(g.clone()), None),
        Asset::Storage(s) => (None, Some(s.clone())),
    };
    let price = PriceSection {
        days_per_year: Some(scenario.days_per_year),
        ..match &scenario.price {
            Some(PriceInput::Flat(p)) => PriceSection {
                price_usd_per_mwh: Some(*p),
                ..Default::default()
            },
            Some(PriceInput::Series(s)) => PriceSection {
                daily_price: Some(s.daily_price.clone()),
                ..Default::default()
            },
            None => PriceSection::default(),
        }
    };
    let doc = ScenarioDoc {
        generation,
        storage,
        price: Some(price),
        schedule: scenario.schedule.as_ref().map(|s| ScheduleSection {
            daily_charge: Some(s.daily_charge.clone()),
            daily_discharge: Some(s.daily_discharge.clone()),
            schedule_csv: None,
        }),
        sweep: scenario
            .sweeps
            .iter()
            .map(|s| SweepEntry {
                parameter: s.parameter,
                start: s.start,
                stop: s.stop,
                steps: s.steps,
            })
            .collect(),
        technology: scenario
            .technologies
            .iter()
            .map(|t| TechnologyEntry {
                name: t.name.clone(),
                price_usd_per_mwh: Some(t.price),
                days_per_year: Some(t.days),
                annualized_power_cost: t.annualized_power_cost,
                annualized_energy_cost: t.annualized_energy_cost,
                roundtrip_efficiency: t.roundtrip_efficiency,
                charging_hours: t.charging_hours,
            })
            .collect(),
    };
    toml::to_string(&doc).expect("scenario documents always serialize")
}
