//! Domain types shared by the engine, the sweeps and the I/O layer.
//!
//! Every type implements [`Validate`]. Values are plain data with public fields; the engine
//! validates its inputs on entry, so nothing downstream of a successful validation can divide by
//! zero or propagate a NaN.
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

/// Days in the price/dispatch year unless a scenario says otherwise. Leap days are not modelled.
pub const DEFAULT_DAYS_PER_YEAR: usize = 365;

/// Relative slack used for consistency checks between derived quantities
/// (`E^max = P^max * T^ch`, `discharge <= efficiency * charge`, LCOE breakdown identity).
pub const RELATIVE_TOLERANCE: f64 = 1e-9;

/// US dollars, held at full `f64` precision and rendered to cents for presentation.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize)]
#[serde(transparent)]
pub struct Money(f64);

impl Money {
    pub const ZERO: Money = Money(0.0);

    pub const fn new(usd: f64) -> Self {
        Money(usd)
    }

    pub const fn usd(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// Cent-precision rendering. Never emits `-0.00`.
    pub fn to_cents_string(self) -> String {
        let s = format!("{:.2}", self.0);
        if s == "-0.00" {
            "0.00".to_owned()
        } else {
            s
        }
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cents_string())
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0 + rhs.0)
    }
}

impl Sub for Money {
    type Output = Money;
    fn sub(self, rhs: Money) -> Money {
        Money(self.0 - rhs.0)
    }
}

impl Neg for Money {
    type Output = Money;
    fn neg(self) -> Money {
        Money(-self.0)
    }
}

impl Mul<f64> for Money {
    type Output = Money;
    fn mul(self, rhs: f64) -> Money {
        Money(self.0 * rhs)
    }
}

impl Div<f64> for Money {
    type Output = Money;
    fn div(self, rhs: f64) -> Money {
        Money(self.0 / rhs)
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        Money(iter.map(|m| m.0).sum())
    }
}

impl FromStr for Money {
    type Err = DecimalParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_decimal(s).map(Money)
    }
}

impl<'de> Deserialize<'de> for Money {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct MoneyVisitor;

        impl serde::de::Visitor<'_> for MoneyVisitor {
            type Value = Money;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or a decimal string such as \"107.10\"")
            }

            fn visit_f64<E: serde::de::Error>(self, v: f64) -> Result<Money, E> {
                Ok(Money(v))
            }

            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<Money, E> {
                Ok(Money(v as f64))
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<Money, E> {
                Ok(Money(v as f64))
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Money, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(MoneyVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{0}` is not a plain decimal number (expected digits with an optional `-` sign and `.` fraction)")]
pub struct DecimalParseError(pub String);

/// Parses a plain decimal literal (`-12`, `107.1`, `.5`, `3.`). Exponents, `inf`, `nan`, thousands
/// separators and locale decimal commas are rejected. The accepted text is then converted once,
/// with correct rounding, to the nearest `f64`.
pub fn parse_decimal(text: &str) -> Result<f64, DecimalParseError> {
    let s = text.trim();
    let digits = s.strip_prefix('-').unwrap_or(s);
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    if int_part.len() + frac_part.len() == 0 || !all_digits(int_part) || !all_digits(frac_part) {
        return Err(DecimalParseError(text.to_owned()));
    }
    s.parse::<f64>()
        .map_err(|_| DecimalParseError(text.to_owned()))
}

/// One error per violated invariant. Messages always name the offending field.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("{field} must be a finite number")]
    NonFinite { field: &'static str },
    #[error("{field} must be >= 0 (got {value})")]
    Negative { field: &'static str, value: f64 },
    #[error("{field} must be > 0 (got {value})")]
    NotPositive { field: &'static str, value: f64 },
    #[error("roundtrip_efficiency {0} is outside (0, 1]")]
    EfficiencyOutOfRange(f64),
    #[error("charging_hours {0} is outside (0, 24]")]
    ChargingHoursOutOfRange(f64),
    #[error("lifetime_years must be >= 1")]
    ZeroLifetime,
    #[error("annual_energy has {found} entries but lifetime_years is {expected}")]
    EnergyYearsMismatch { expected: usize, found: usize },
    #[error("annual_energy must contain at least one year with energy > 0")]
    NoEnergyProduced,
    #[error("days_per_year must be >= 1")]
    ZeroDays,
    #[error("daily_price has {found} entries but days_per_year is {expected}")]
    PriceLengthMismatch { expected: usize, found: usize },
    #[error("daily_charge has {charge} entries and daily_discharge has {discharge}; both must be {expected}")]
    ScheduleLengthMismatch {
        expected: usize,
        charge: usize,
        discharge: usize,
    },
    #[error("daily_charge on day {day} is {charge} MWh, above rated_energy {rated_energy} MWh")]
    ChargeExceedsRating {
        day: usize,
        charge: f64,
        rated_energy: f64,
    },
    #[error("daily_discharge on day {day} is {discharge} MWh, above roundtrip_efficiency x daily_charge = {limit} MWh")]
    DischargeExceedsEfficiency {
        day: usize,
        discharge: f64,
        limit: f64,
    },
    #[error("daily_discharge sums to zero; the LCOE denominator must be positive")]
    ZeroTotalDischarge,
    #[error("lcoe {lcoe} does not equal (capital_cost_component + operating_cost_component) / total_energy = {expected}")]
    InconsistentBreakdown { lcoe: f64, expected: f64 },
    #[error("sweep table for {parameter} needs at least 2 points (got {found})")]
    TooFewPoints { parameter: String, found: usize },
    #[error(
        "sweep table for {parameter} is not strictly increasing in the parameter at point {index}"
    )]
    NotIncreasing { parameter: String, index: usize },
    #[error(
        "technology {name}: expected min_lcoe <= avg_lcoe <= max_lcoe (got {min} / {avg} / {max})"
    )]
    RangeOrder {
        name: String,
        min: f64,
        avg: f64,
        max: f64,
    },
}

/// Invariant checking for domain values.
pub trait Validate: Sized {
    fn check(&self) -> Result<(), ValidationError>;

    /// Returns the value unchanged when every invariant holds.
    fn validate(self) -> Result<Self, ValidationError> {
        self.check()?;
        Ok(self)
    }
}

pub(crate) fn finite(field: &'static str, value: f64) -> Result<f64, ValidationError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ValidationError::NonFinite { field })
    }
}

pub(crate) fn non_negative(field: &'static str, value: f64) -> Result<f64, ValidationError> {
    if finite(field, value)? < 0.0 {
        Err(ValidationError::Negative { field, value })
    } else {
        Ok(value)
    }
}

pub(crate) fn positive(field: &'static str, value: f64) -> Result<f64, ValidationError> {
    if finite(field, value)? <= 0.0 {
        Err(ValidationError::NotPositive { field, value })
    } else {
        Ok(value)
    }
}

/// `value > limit` beyond the shared relative tolerance.
pub(crate) fn exceeds(value: f64, limit: f64) -> bool {
    value > limit + RELATIVE_TOLERANCE * limit.abs()
}

pub(crate) fn check_efficiency(eta: f64) -> Result<(), ValidationError> {
    if eta.is_finite() && eta > 0.0 && eta <= 1.0 {
        Ok(())
    } else {
        Err(ValidationError::EfficiencyOutOfRange(eta))
    }
}

pub(crate) fn check_charging_hours(hours: f64) -> Result<(), ValidationError> {
    if hours.is_finite() && hours > 0.0 && hours <= 24.0 {
        Ok(())
    } else {
        Err(ValidationError::ChargingHoursOutOfRange(hours))
    }
}

/// A conventional generator: capital, fixed and variable O&M, fuel, and energy per year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationAsset {
    /// Total capital cost, incurred in year 1.
    pub investment_cost: Money,
    /// Fixed O&M, USD per year.
    pub fixed_om_per_year: Money,
    /// Variable O&M, USD per MWh produced.
    pub variable_om_per_mwh: Money,
    /// Fuel (unit generation) cost, USD per MWh produced.
    pub fuel_cost_per_mwh: Money,
    /// Energy produced in each year of life, MWh.
    pub annual_energy: Vec<f64>,
    pub lifetime_years: u32,
    /// Fraction per year, e.g. `0.07`.
    pub discount_rate: f64,
}

impl Validate for GenerationAsset {
    fn check(&self) -> Result<(), ValidationError> {
        non_negative("investment_cost", self.investment_cost.usd())?;
        non_negative("fixed_om_per_year", self.fixed_om_per_year.usd())?;
        non_negative("variable_om_per_mwh", self.variable_om_per_mwh.usd())?;
        non_negative("fuel_cost_per_mwh", self.fuel_cost_per_mwh.usd())?;
        non_negative("discount_rate", self.discount_rate)?;
        if self.lifetime_years == 0 {
            return Err(ValidationError::ZeroLifetime);
        }
        if self.annual_energy.len() != self.lifetime_years as usize {
            return Err(ValidationError::EnergyYearsMismatch {
                expected: self.lifetime_years as usize,
                found: self.annual_energy.len(),
            });
        }
        for &e in &self.annual_energy {
            non_negative("annual_energy", e)?;
        }
        if !self.annual_energy.iter().any(|&e| e > 0.0) {
            return Err(ValidationError::NoEnergyProduced);
        }
        Ok(())
    }
}

/// An energy storage system described by annualized capital costs and ratings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StorageAsset {
    /// USD per MW of rated power per year.
    pub annualized_power_cost: Money,
    /// USD per MWh of rated energy per year.
    pub annualized_energy_cost: Money,
    /// MW.
    pub rated_power: f64,
    /// MWh.
    pub rated_energy: f64,
    /// Fraction of charged energy returned on discharge, in (0, 1].
    pub roundtrip_efficiency: f64,
    /// Hours per day spent charging at rated power, in (0, 24].
    pub charging_hours: f64,
}

impl StorageAsset {
    /// Whether `rated_energy == rated_power * charging_hours` within [`RELATIVE_TOLERANCE`].
    pub fn ratings_consistent(&self) -> bool {
        let implied = self.rated_power * self.charging_hours;
        (self.rated_energy - implied).abs()
            <= RELATIVE_TOLERANCE * implied.abs().max(self.rated_energy.abs())
    }

    /// Same asset with both ratings multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        StorageAsset {
            rated_power: self.rated_power * factor,
            rated_energy: self.rated_energy * factor,
            ..self.clone()
        }
    }
}

impl Validate for StorageAsset {
    fn check(&self) -> Result<(), ValidationError> {
        non_negative("annualized_power_cost", self.annualized_power_cost.usd())?;
        non_negative("annualized_energy_cost", self.annualized_energy_cost.usd())?;
        positive("rated_power", self.rated_power)?;
        positive("rated_energy", self.rated_energy)?;
        check_efficiency(self.roundtrip_efficiency)?;
        check_charging_hours(self.charging_hours)
    }
}

/// Grid price for each day of the year, USD per MWh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceSeries {
    pub daily_price: Vec<Money>,
    pub days_per_year: usize,
}

impl PriceSeries {
    /// The series for a year of `days` identical prices.
    pub fn flat(price: Money, days: usize) -> Self {
        PriceSeries {
            daily_price: vec![price; days],
            days_per_year: days,
        }
    }

    /// Builds a series whose year length is the number of prices given.
    pub fn from_prices(daily_price: Vec<Money>) -> Self {
        let days_per_year = daily_price.len();
        PriceSeries {
            daily_price,
            days_per_year,
        }
    }

    pub fn len(&self) -> usize {
        self.daily_price.len()
    }

    pub fn is_empty(&self) -> bool {
        self.daily_price.is_empty()
    }

    /// Arithmetic mean of the daily prices.
    pub fn average(&self) -> Money {
        self.daily_price.iter().copied().sum::<Money>() / self.daily_price.len() as f64
    }
}

impl Validate for PriceSeries {
    fn check(&self) -> Result<(), ValidationError> {
        if self.days_per_year == 0 {
            return Err(ValidationError::ZeroDays);
        }
        if self.daily_price.len() != self.days_per_year {
            return Err(ValidationError::PriceLengthMismatch {
                expected: self.days_per_year,
                found: self.daily_price.len(),
            });
        }
        for p in &self.daily_price {
            non_negative("daily_price", p.usd())?;
        }
        Ok(())
    }
}

/// Energy charged into and discharged from storage on each day, MWh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispatchSchedule {
    pub daily_charge: Vec<f64>,
    pub daily_discharge: Vec<f64>,
}

impl DispatchSchedule {
    pub fn len(&self) -> usize {
        self.daily_charge.len()
    }

    pub fn is_empty(&self) -> bool {
        self.daily_charge.is_empty()
    }

    pub fn total_charge(&self) -> f64 {
        self.daily_charge.iter().sum()
    }

    pub fn total_discharge(&self) -> f64 {
        self.daily_discharge.iter().sum()
    }

    /// Checks the intrinsic invariants plus the ones that depend on the storage asset and the
    /// price series the schedule is paired with.
    pub fn check_against(
        &self,
        asset: &StorageAsset,
        prices: &PriceSeries,
    ) -> Result<(), ValidationError> {
        if self.daily_charge.len() != prices.len() || self.daily_discharge.len() != prices.len() {
            return Err(ValidationError::ScheduleLengthMismatch {
                expected: prices.len(),
                charge: self.daily_charge.len(),
                discharge: self.daily_discharge.len(),
            });
        }
        self.check()?;
        let eta = asset.roundtrip_efficiency;
        for (day, (&charge, &discharge)) in self
            .daily_charge
            .iter()
            .zip(&self.daily_discharge)
            .enumerate()
        {
            if exceeds(charge, asset.rated_energy) {
                return Err(ValidationError::ChargeExceedsRating {
                    day: day + 1,
                    charge,
                    rated_energy: asset.rated_energy,
                });
            }
            let limit = eta * charge;
            if exceeds(discharge, limit) {
                return Err(ValidationError::DischargeExceedsEfficiency {
                    day: day + 1,
                    discharge,
                    limit,
                });
            }
        }
        Ok(())
    }

    pub fn validate_for(
        self,
        asset: &StorageAsset,
        prices: &PriceSeries,
    ) -> Result<Self, ValidationError> {
        self.check_against(asset, prices)?;
        Ok(self)
    }
}

impl Validate for DispatchSchedule {
    fn check(&self) -> Result<(), ValidationError> {
        if self.daily_charge.len() != self.daily_discharge.len() {
            return Err(ValidationError::ScheduleLengthMismatch {
                expected: self.daily_charge.len(),
                charge: self.daily_charge.len(),
                discharge: self.daily_discharge.len(),
            });
        }
        for &c in &self.daily_charge {
            non_negative("daily_charge", c)?;
        }
        for &d in &self.daily_discharge {
            non_negative("daily_discharge", d)?;
        }
        if self.total_discharge() <= 0.0 {
            return Err(ValidationError::ZeroTotalDischarge);
        }
        Ok(())
    }
}

/// A levelized cost with the numerator split into capital and operating shares.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LcoeResult {
    #[serde(rename = "lcoe_usd_per_mwh")]
    pub lcoe: Money,
    #[serde(rename = "capital_cost_usd")]
    pub capital_cost_component: Money,
    #[serde(rename = "operating_cost_usd")]
    pub operating_cost_component: Money,
    #[serde(rename = "total_energy_mwh")]
    pub total_energy: f64,
}

impl LcoeResult {
    /// Derives the levelized value from its parts.
    pub fn from_components(
        capital_cost_component: Money,
        operating_cost_component: Money,
        total_energy: f64,
    ) -> Result<Self, ValidationError> {
        positive("total_energy", total_energy)?;
        let result = LcoeResult {
            lcoe: (capital_cost_component + operating_cost_component) / total_energy,
            capital_cost_component,
            operating_cost_component,
            total_energy,
        };
        result.validate()
    }
}

impl Validate for LcoeResult {
    fn check(&self) -> Result<(), ValidationError> {
        finite("lcoe", self.lcoe.usd())?;
        finite("capital_cost_component", self.capital_cost_component.usd())?;
        finite(
            "operating_cost_component",
            self.operating_cost_component.usd(),
        )?;
        positive("total_energy", self.total_energy)?;
        let expected =
            (self.capital_cost_component + self.operating_cost_component).usd() / self.total_energy;
        if (self.lcoe.usd() - expected).abs()
            > RELATIVE_TOLERANCE * expected.abs().max(f64::MIN_POSITIVE)
        {
            return Err(ValidationError::InconsistentBreakdown {
                lcoe: self.lcoe.usd(),
                expected,
            });
        }
        Ok(())
    }
}

/// The storage parameter varied by a one-dimensional sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    ChargingHours,
    Price,
    Efficiency,
    EnergyToPowerCostRatio,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 4] = [
        SweepParameter::ChargingHours,
        SweepParameter::Price,
        SweepParameter::Efficiency,
        SweepParameter::EnergyToPowerCostRatio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::ChargingHours => "charging_hours",
            SweepParameter::Price => "price",
            SweepParameter::Efficiency => "efficiency",
            SweepParameter::EnergyToPowerCostRatio => "energy_to_power_cost_ratio",
        }
    }

    /// Column header carrying the unit.
    pub fn column(self) -> &'static str {
        match self {
            SweepParameter::ChargingHours => "charging_hours_h",
            SweepParameter::Price => "price_usd_per_mwh",
            SweepParameter::Efficiency => "efficiency_fraction",
            SweepParameter::EnergyToPowerCostRatio => "energy_to_power_cost_ratio_mw_per_mwh",
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SweepParameter::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                format!(
                    "unknown sweep parameter `{s}` (expected one of charging_hours, price, efficiency, energy_to_power_cost_ratio)"
                )
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPoint {
    pub value: f64,
    #[serde(rename = "lcoe_usd_per_mwh")]
    pub lcoe: Money,
}

/// LCOE as a function of one parameter, in increasing parameter order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepTable {
    pub parameter: SweepParameter,
    pub points: Vec<SweepPoint>,
}

impl SweepTable {
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.value)
    }

    pub fn lcoes(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.lcoe.usd())
    }
}

impl Validate for SweepTable {
    fn check(&self) -> Result<(), ValidationError> {
        if self.points.len() < 2 {
            return Err(ValidationError::TooFewPoints {
                parameter: self.parameter.to_string(),
                found: self.points.len(),
            });
        }
        for p in &self.points {
            finite("value", p.value)?;
            finite("lcoe", p.lcoe.usd())?;
        }
        if let Some(index) = self
            .points
            .windows(2)
            .position(|w| w[1].value <= w[0].value)
        {
            return Err(ValidationError::NotIncreasing {
                parameter: self.parameter.to_string(),
                index: index + 1,
            });
        }
        Ok(())
    }
}

/// Minimum, average and maximum LCOE for one technology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TechnologyRange {
    pub technology_name: String,
    #[serde(rename = "min_lcoe_usd_per_mwh")]
    pub min_lcoe: Money,
    #[serde(rename = "avg_lcoe_usd_per_mwh")]
    pub avg_lcoe: Money,
    #[serde(rename = "max_lcoe_usd_per_mwh")]
    pub max_lcoe: Money,
}

impl Validate for TechnologyRange {
    fn check(&self) -> Result<(), ValidationError> {
        finite("min_lcoe", self.min_lcoe.usd())?;
        finite("avg_lcoe", self.avg_lcoe.usd())?;
        finite("max_lcoe", self.max_lcoe.usd())?;
        if self.min_lcoe > self.avg_lcoe || self.avg_lcoe > self.max_lcoe {
            return Err(ValidationError::RangeOrder {
                name: self.technology_name.clone(),
                min: self.min_lcoe.usd(),
                avg: self.avg_lcoe.usd(),
                max: self.max_lcoe.usd(),
            });
        }
        Ok(())
    }
}
