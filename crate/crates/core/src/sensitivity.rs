//! One-parameter sweeps of the closed-form storage LCOE, and min/avg/max ranges per technology.
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::engine::{lcoe_storage_simplified, LcoeError};
use crate::model::{
    finite, Money, StorageAsset, SweepParameter, SweepPoint, SweepTable, TechnologyRange, Validate,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("sweep over {parameter}: start ({start}) must be below stop ({stop})")]
    EmptyInterval {
        parameter: SweepParameter,
        start: f64,
        stop: f64,
    },
    #[error("sweep over {parameter}: steps must be >= 2 (got {steps})")]
    TooFewSteps {
        parameter: SweepParameter,
        steps: usize,
    },
    #[error("energy_to_power_cost_ratio sweep needs annualized_power_cost > 0")]
    ZeroPowerCost,
    #[error("sweep over {parameter}: base scenario is invalid: {source}")]
    InvalidBase {
        parameter: SweepParameter,
        source: LcoeError,
    },
    #[error("sweep over {parameter}: point {index} ({parameter} = {value}) is invalid: {source}")]
    InvalidPoint {
        parameter: SweepParameter,
        index: usize,
        value: f64,
        source: LcoeError,
    },
    #[error("technology {name}: {field} range has min {min} > max {max}")]
    InvertedRange {
        name: String,
        field: &'static str,
        min: f64,
        max: f64,
    },
    #[error("technology {name}: {corner} corner is invalid: {source}")]
    InvalidCorner {
        name: String,
        corner: &'static str,
        source: LcoeError,
    },
}

/// A linear sweep of one storage parameter around a base scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub base_asset: StorageAsset,
    pub base_price: Money,
    pub days: usize,
}

impl SweepSpec {
    /// Evenly spaced parameter values; the last one is exactly `stop`.
    pub fn values(&self) -> Vec<f64> {
        let last = self.steps.saturating_sub(1).max(1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * (i as f64 / last)
                }
            })
            .collect()
    }

    /// The asset and price at which a given parameter value is evaluated.
    ///
    /// Charging-hours points re-derive `rated_energy = rated_power * charging_hours`. Cost-ratio
    /// points keep the power cost and set the energy cost to `ratio * annualized_power_cost`.
    pub fn point(&self, value: f64) -> (StorageAsset, Money) {
        let mut asset = self.base_asset.clone();
        let mut price = self.base_price;
        match self.parameter {
            SweepParameter::ChargingHours => {
                asset.charging_hours = value;
                asset.rated_energy = asset.rated_power * value;
            }
            SweepParameter::Price => price = Money::new(value),
            SweepParameter::Efficiency => asset.roundtrip_efficiency = value,
            SweepParameter::EnergyToPowerCostRatio => {
                asset.annualized_energy_cost = asset.annualized_power_cost * value;
            }
        }
        (asset, price)
    }

    pub fn check(&self) -> Result<(), SweepError> {
        let parameter = self.parameter;
        let in_order = self.start.is_finite() && self.stop.is_finite() && self.start < self.stop;
        if !in_order {
            return Err(SweepError::EmptyInterval {
                parameter,
                start: self.start,
                stop: self.stop,
            });
        }
        if self.steps < 2 {
            return Err(SweepError::TooFewSteps {
                parameter,
                steps: self.steps,
            });
        }
        lcoe_storage_simplified(&self.base_asset, self.base_price, self.days)
            .map_err(|source| SweepError::InvalidBase { parameter, source })?;
        if parameter == SweepParameter::EnergyToPowerCostRatio
            && self.base_asset.annualized_power_cost.usd() <= 0.0
        {
            return Err(SweepError::ZeroPowerCost);
        }
        Ok(())
    }
}

/// Evaluates the closed-form LCOE at each point of the sweep, in parameter order.
pub fn sweep(spec: &SweepSpec) -> Result<SweepTable, SweepError> {
    spec.check()?;
    let points = spec
        .values()
        .into_iter()
        .enumerate()
        .map(|(i, value)| {
            let (asset, price) = spec.point(value);
            lcoe_storage_simplified(&asset, price, spec.days)
                .map(|r| SweepPoint {
                    value,
                    lcoe: r.lcoe,
                })
                .map_err(|source| SweepError::InvalidPoint {
                    parameter: spec.parameter,
                    index: i + 1,
                    value,
                    source,
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let table = SweepTable {
        parameter: spec.parameter,
        points,
    };
    debug_assert!(table.check().is_ok());
    Ok(table)
}

/// Closed interval of a parameter. In files it is either a bare number (degenerate range) or
/// `{ min = .., max = .. }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamRange {
    pub min: f64,
    pub max: f64,
}

impl ParamRange {
    pub fn new(min: f64, max: f64) -> Self {
        ParamRange { min, max }
    }

    pub fn fixed(value: f64) -> Self {
        ParamRange {
            min: value,
            max: value,
        }
    }

    pub fn midpoint(self) -> f64 {
        self.min + (self.max - self.min) / 2.0
    }

    pub fn is_degenerate(self) -> bool {
        self.min == self.max
    }
}

impl<'de> Deserialize<'de> for ParamRange {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Bounds {
            min: f64,
            max: f64,
        }

        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Fixed(f64),
            Bounds(Bounds),
        }

        match Repr::deserialize(deserializer).map_err(|_| {
            serde::de::Error::custom("expected a number or a table `{ min = .., max = .. }`")
        })? {
            Repr::Fixed(v) => Ok(ParamRange::fixed(v)),
            Repr::Bounds(b) => Ok(ParamRange::new(b.min, b.max)),
        }
    }
}

/// Parameter box for one storage technology.
#[derive(Debug, Clone, PartialEq)]
pub struct TechnologySpec {
    pub name: String,
    pub annualized_power_cost: ParamRange,
    pub annualized_energy_cost: ParamRange,
    pub roundtrip_efficiency: ParamRange,
    pub charging_hours: ParamRange,
    pub price: Money,
    pub days: usize,
}

impl TechnologySpec {
    fn ranges(&self) -> [(&'static str, ParamRange); 4] {
        [
            ("annualized_power_cost", self.annualized_power_cost),
            ("annualized_energy_cost", self.annualized_energy_cost),
            ("roundtrip_efficiency", self.roundtrip_efficiency),
            ("charging_hours", self.charging_hours),
        ]
    }

    /// A 1 MW asset at the given parameters. Size does not enter the closed form.
    pub fn asset_at(
        &self,
        power_cost: f64,
        energy_cost: f64,
        efficiency: f64,
        hours: f64,
    ) -> StorageAsset {
        StorageAsset {
            annualized_power_cost: Money::new(power_cost),
            annualized_energy_cost: Money::new(energy_cost),
            rated_power: 1.0,
            rated_energy: hours,
            roundtrip_efficiency: efficiency,
            charging_hours: hours,
        }
    }

    /// Closed-form LCOE at one point of the box.
    pub fn lcoe_at(
        &self,
        power_cost: f64,
        energy_cost: f64,
        efficiency: f64,
        hours: f64,
    ) -> Result<Money, LcoeError> {
        let asset = self.asset_at(power_cost, energy_cost, efficiency, hours);
        lcoe_storage_simplified(&asset, self.price, self.days).map(|r| r.lcoe)
    }
}

/// Min, average and max LCOE over a technology's parameter box.
///
/// The closed form is non-decreasing in both capital costs and non-increasing in efficiency and
/// charging hours, so the extremes sit on two opposite corners of the box. The average is the
/// LCOE at the midpoint of every range.
pub fn technology_range(spec: &TechnologySpec) -> Result<TechnologyRange, SweepError> {
    for (field, range) in spec.ranges() {
        let bad = |source| SweepError::InvalidCorner {
            name: spec.name.clone(),
            corner: "bounds",
            source: LcoeError::Validation(source),
        };
        finite(field, range.min).map_err(bad)?;
        finite(field, range.max).map_err(bad)?;
        if range.min > range.max {
            return Err(SweepError::InvertedRange {
                name: spec.name.clone(),
                field,
                min: range.min,
                max: range.max,
            });
        }
    }
    let corner = |label, value: Result<Money, LcoeError>| {
        value.map_err(|source| SweepError::InvalidCorner {
            name: spec.name.clone(),
            corner: label,
            source,
        })
    };
    let (p, e, eta, h) = (
        spec.annualized_power_cost,
        spec.annualized_energy_cost,
        spec.roundtrip_efficiency,
        spec.charging_hours,
    );
    let cheap = corner("low-cost", spec.lcoe_at(p.min, e.min, eta.max, h.max))?;
    let dear = corner("high-cost", spec.lcoe_at(p.max, e.max, eta.min, h.min))?;
    let mid = corner(
        "midpoint",
        spec.lcoe_at(p.midpoint(), e.midpoint(), eta.midpoint(), h.midpoint()),
    )?;

    // Axes with no effect (charging hours when the power cost is zero) can leave the corners an
    // ulp out of order, and the midpoint an ulp outside them.
    let (min_lcoe, max_lcoe) = if cheap <= dear {
        (cheap, dear)
    } else {
        (dear, cheap)
    };
    let avg_lcoe = Money::new(mid.usd().clamp(min_lcoe.usd(), max_lcoe.usd()));

    Ok(TechnologyRange {
        technology_name: spec.name.clone(),
        min_lcoe,
        avg_lcoe,
        max_lcoe,
    })
}
