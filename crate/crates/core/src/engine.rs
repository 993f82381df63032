//! Pure LCOE kernels.
//!
//! Generation assets are levelized over their lifetime with discount coefficients
//! `1 / (1 + d)^(t - 1)` applied to both costs and energy, so that the investment lands in year 1
//! undiscounted and `d = 0` reduces to plain totals.
//!
//! Storage is levelized on a one-year basis: capital enters through annualized power and energy
//! costs, the cost of charging plays the role a generator's fuel plays, and the denominator is the
//! energy discharged. No discounting is applied to storage.
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    non_negative, DispatchSchedule, GenerationAsset, LcoeResult, Money, PriceSeries, StorageAsset,
    Validate, ValidationError,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LcoeError {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("discounted annual_energy sums to zero; the LCOE denominator must be positive")]
    ZeroDiscountedEnergy,
    #[error("rated_energy {rated_energy} MWh does not equal rated_power x charging_hours = {implied} MWh")]
    RatingsInconsistent { rated_energy: f64, implied: f64 },
}

/// Which levelization formula produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Formulation {
    /// Discounted lifetime LCOE of a generator.
    #[serde(rename = "eq1-generation")]
    Generation,
    /// Storage LCOE over an explicit schedule and daily prices.
    #[serde(rename = "eq2-storage")]
    StorageSchedule,
    /// Closed-form storage LCOE under canonical cycling.
    #[serde(rename = "eq3-simplified")]
    StorageSimplified,
}

impl Formulation {
    pub fn label(self) -> &'static str {
        match self {
            Formulation::Generation => "eq1-generation",
            Formulation::StorageSchedule => "eq2-storage",
            Formulation::StorageSimplified => "eq3-simplified",
        }
    }
}

impl std::fmt::Display for Formulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Lifetime LCOE of a generator.
///
/// ```text
/// numerator   = I + sum_t [F + (C_F + V) * E_t] / (1 + d)^(t - 1)
/// denominator =     sum_t E_t / (1 + d)^(t - 1)
/// ```
///
/// The capital share of the result is `I`; fixed O&M, variable O&M and fuel are the operating
/// share. `total_energy` is the discounted energy.
pub fn lcoe_generation(asset: &GenerationAsset) -> Result<LcoeResult, LcoeError> {
    asset.check()?;
    let per_mwh = (asset.fuel_cost_per_mwh + asset.variable_om_per_mwh).usd();
    let growth = 1.0 + asset.discount_rate;

    let mut coefficient = 1.0;
    let mut operating = 0.0;
    let mut energy = 0.0;
    for &produced in &asset.annual_energy {
        operating += (asset.fixed_om_per_year.usd() + per_mwh * produced) * coefficient;
        energy += produced * coefficient;
        coefficient /= growth;
    }
    if energy <= 0.0 {
        return Err(LcoeError::ZeroDiscountedEnergy);
    }
    Ok(LcoeResult::from_components(
        asset.investment_cost,
        Money::new(operating),
        energy,
    )?)
}

/// One-year storage LCOE over an explicit dispatch schedule and daily prices:
///
/// ```text
/// (CC^P * P^max + CC^E * E^max + sum_t price_t * charge_t) / sum_t discharge_t
/// ```
pub fn lcoe_storage(
    asset: &StorageAsset,
    prices: &PriceSeries,
    schedule: &DispatchSchedule,
) -> Result<LcoeResult, LcoeError> {
    asset.check()?;
    prices.check()?;
    schedule.check_against(asset, prices)?;

    let capital = asset.annualized_power_cost * asset.rated_power
        + asset.annualized_energy_cost * asset.rated_energy;
    let charging: Money = prices
        .daily_price
        .iter()
        .zip(&schedule.daily_charge)
        .map(|(&price, &charge)| price * charge)
        .sum();
    Ok(LcoeResult::from_components(
        capital,
        charging,
        schedule.total_discharge(),
    )?)
}

/// Fails unless `rated_energy == rated_power * charging_hours` (relative tolerance `1e-9`).
pub fn check_ratings(asset: &StorageAsset) -> Result<(), LcoeError> {
    if asset.ratings_consistent() {
        Ok(())
    } else {
        Err(LcoeError::RatingsInconsistent {
            rated_energy: asset.rated_energy,
            implied: asset.rated_power * asset.charging_hours,
        })
    }
}

/// Full daily cycling: charge to rated energy every day and discharge `efficiency` of it.
pub fn canonical_schedule(
    asset: &StorageAsset,
    days: usize,
) -> Result<DispatchSchedule, LcoeError> {
    asset.check()?;
    if days == 0 {
        return Err(ValidationError::ZeroDays.into());
    }
    check_ratings(asset)?;
    Ok(DispatchSchedule {
        daily_charge: vec![asset.rated_energy; days],
        daily_discharge: vec![asset.roundtrip_efficiency * asset.rated_energy; days],
    })
}

/// Closed-form storage LCOE under canonical cycling and a single average price:
///
/// ```text
/// (CC^P + CC^E * T^ch + price * T^ch * T) / (efficiency * T^ch * T)
/// ```
///
/// Rated size cancels, so the breakdown is per MW of rated power: the capital share is
/// `CC^P + CC^E * T^ch`, the operating share is `price * T^ch * T` and `total_energy` is
/// `efficiency * T^ch * T`.
pub fn lcoe_storage_simplified(
    asset: &StorageAsset,
    average_price: Money,
    days: usize,
) -> Result<LcoeResult, LcoeError> {
    asset.check()?;
    non_negative("average_price", average_price.usd())?;
    if days == 0 {
        return Err(ValidationError::ZeroDays.into());
    }
    let hours = asset.charging_hours;
    let year = days as f64;
    let capital = asset.annualized_power_cost + asset.annualized_energy_cost * hours;
    let operating = average_price * (hours * year);
    let energy = asset.roundtrip_efficiency * hours * year;
    Ok(LcoeResult::from_components(capital, operating, energy)?)
}

/// Outcome of comparing an LCOE with the utility rate at the point of connection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParityVerdict {
    #[serde(rename = "lcoe_usd_per_mwh")]
    pub lcoe: Money,
    #[serde(rename = "reference_rate_usd_per_mwh")]
    pub reference_rate: Money,
    pub at_parity: bool,
    /// `reference_rate - lcoe`; non-negative exactly when at parity.
    #[serde(rename = "margin_usd_per_mwh")]
    pub margin: Money,
}

/// Grid parity holds when the LCOE is equal to or less than the utility rate.
pub fn grid_parity(lcoe: Money, utility_rate: Money) -> Result<ParityVerdict, ValidationError> {
    non_negative("lcoe", lcoe.usd())?;
    non_negative("utility_rate", utility_rate.usd())?;
    Ok(ParityVerdict {
        lcoe,
        reference_rate: utility_rate,
        at_parity: lcoe <= utility_rate,
        margin: utility_rate - lcoe,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table1() -> StorageAsset {
        StorageAsset {
            annualized_power_cost: Money::new(60_000.0),
            annualized_energy_cost: Money::new(30_000.0),
            rated_power: 1.0,
            rated_energy: 12.0,
            roundtrip_efficiency: 0.9,
            charging_hours: 12.0,
        }
    }

    fn generator(
        investment: f64,
        fixed: f64,
        variable: f64,
        fuel: f64,
        energy: Vec<f64>,
        d: f64,
    ) -> GenerationAsset {
        GenerationAsset {
            investment_cost: Money::new(investment),
            fixed_om_per_year: Money::new(fixed),
            variable_om_per_mwh: Money::new(variable),
            fuel_cost_per_mwh: Money::new(fuel),
            lifetime_years: energy.len() as u32,
            annual_energy: energy,
            discount_rate: d,
        }
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn single_year_capital_over_energy() {
        let r = lcoe_generation(&generator(1000.0, 0.0, 0.0, 0.0, vec![100.0], 0.0)).unwrap();
        assert_eq!(r.lcoe.usd(), 10.0);
        assert_eq!(r.capital_cost_component.usd(), 1000.0);
        assert_eq!(r.total_energy, 100.0);
    }

    #[test]
    fn per_mwh_costs_pass_through() {
        let r = lcoe_generation(&generator(0.0, 0.0, 3.0, 7.0, vec![50.0, 50.0], 0.0)).unwrap();
        assert_eq!(r.lcoe.usd(), 10.0);
    }

    #[test]
    fn two_year_discounted_matches_cash_flow_oracle() {
        // Year 1: cost 1000 + 100, energy 100, coefficient 1.
        // Year 2: cost 100, energy 100, coefficient 1/1.1.
        // (1100 + 100/1.1) / (100 + 100/1.1) = 1310 / 210 = 131/21.
        let r = lcoe_generation(&generator(
            1000.0,
            100.0,
            0.0,
            0.0,
            vec![100.0, 100.0],
            0.10,
        ))
        .unwrap();
        assert!(rel(r.lcoe.usd(), 131.0 / 21.0) < 1e-9);
    }

    #[test]
    fn discounting_that_underflows_energy_is_an_error() {
        let asset = generator(1.0, 0.0, 0.0, 0.0, vec![0.0, 0.0, 100.0], f64::MAX);
        assert_eq!(
            lcoe_generation(&asset),
            Err(LcoeError::ZeroDiscountedEnergy)
        );
    }

    #[test]
    fn invalid_generator_rejected() {
        let asset = generator(-1.0, 0.0, 0.0, 0.0, vec![1.0], 0.0);
        assert!(matches!(
            lcoe_generation(&asset),
            Err(LcoeError::Validation(ValidationError::Negative {
                field: "investment_cost",
                ..
            }))
        ));
    }

    #[test]
    fn table1_closed_form() {
        let r = lcoe_storage_simplified(&table1(), Money::new(107.1), 365).unwrap();
        // (60000 + 30000*12 + 107.1*12*365) / (0.9*12*365) = 889098 / 3942
        assert!(rel(r.lcoe.usd(), 889_098.0 / 3942.0) < 1e-12);
        assert_eq!(r.capital_cost_component.usd(), 420_000.0);
        assert!(rel(r.operating_cost_component.usd(), 469_098.0) < 1e-12);
        assert!(rel(r.total_energy, 3942.0) < 1e-12);
    }

    #[test]
    fn table1_explicit_schedule() {
        let asset = table1();
        let prices = PriceSeries::flat(Money::new(107.1), 365);
        let schedule = canonical_schedule(&asset, 365).unwrap();
        let r = lcoe_storage(&asset, &prices, &schedule).unwrap();
        assert!(rel(r.lcoe.usd(), 889_098.0 / 3942.0) < 1e-9);
    }

    #[test]
    fn zero_capital_lossless_passes_price_through() {
        let asset = StorageAsset {
            annualized_power_cost: Money::ZERO,
            annualized_energy_cost: Money::ZERO,
            roundtrip_efficiency: 1.0,
            ..table1()
        };
        let prices = PriceSeries::flat(Money::new(100.0), 365);
        let schedule = canonical_schedule(&asset, 365).unwrap();
        let r = lcoe_storage(&asset, &prices, &schedule).unwrap();
        assert!(rel(r.lcoe.usd(), 100.0) < 1e-12);
        let simplified = lcoe_storage_simplified(&asset, Money::new(107.1), 365).unwrap();
        assert!(rel(simplified.lcoe.usd(), 107.1) < 1e-12);
    }

    #[test]
    fn three_day_series_matches_hand_summation() {
        // Capital: 60000*1 + 30000*12 = 420000.
        // Charging: 100*12 + 50*12 + 200*12 = 4200.
        // Discharge: 3 * 10.8 = 32.4.
        let asset = table1();
        let prices =
            PriceSeries::from_prices(vec![Money::new(100.0), Money::new(50.0), Money::new(200.0)]);
        let schedule = DispatchSchedule {
            daily_charge: vec![12.0; 3],
            daily_discharge: vec![10.8; 3],
        };
        let r = lcoe_storage(&asset, &prices, &schedule).unwrap();
        assert!(rel(r.lcoe.usd(), 424_200.0 / 32.4) < 1e-9);
        assert_eq!(r.operating_cost_component.usd(), 4200.0);
    }

    #[test]
    fn canonical_schedule_shapes() {
        let s = canonical_schedule(&table1(), 365).unwrap();
        assert_eq!(s.len(), 365);
        assert!(s.daily_charge.iter().all(|&c| c == 12.0));
        assert!(s.daily_discharge.iter().all(|&d| (d - 10.8).abs() < 1e-12));

        let lossless = StorageAsset {
            rated_power: 1.0,
            rated_energy: 5.0,
            charging_hours: 5.0,
            roundtrip_efficiency: 1.0,
            ..table1()
        };
        let s = canonical_schedule(&lossless, 2).unwrap();
        assert_eq!(s.daily_charge, vec![5.0, 5.0]);
        assert_eq!(s.daily_discharge, vec![5.0, 5.0]);
    }

    #[test]
    fn canonical_schedule_requires_consistent_ratings() {
        let asset = StorageAsset {
            rated_energy: 10.0,
            ..table1()
        };
        assert_eq!(
            canonical_schedule(&asset, 365),
            Err(LcoeError::RatingsInconsistent {
                rated_energy: 10.0,
                implied: 12.0
            })
        );
        assert_eq!(
            canonical_schedule(&table1(), 0),
            Err(LcoeError::Validation(ValidationError::ZeroDays))
        );
    }

    #[test]
    fn six_hour_closed_form_equals_schedule_route() {
        let asset = StorageAsset {
            rated_energy: 6.0,
            charging_hours: 6.0,
            ..table1()
        };
        // Explicit route, summed by hand: (60000 + 30000*6 + 107.1*6*365) / (0.9*6*365)
        // = 474549 / 1971.
        let closed = lcoe_storage_simplified(&asset, Money::new(107.1), 365).unwrap();
        assert!(rel(closed.lcoe.usd(), 474_549.0 / 1971.0) < 1e-9);
        let prices = PriceSeries::flat(Money::new(107.1), 365);
        let explicit =
            lcoe_storage(&asset, &prices, &canonical_schedule(&asset, 365).unwrap()).unwrap();
        assert!(rel(closed.lcoe.usd(), explicit.lcoe.usd()) < 1e-9);
    }

    #[test]
    fn negative_average_price_rejected() {
        assert!(matches!(
            lcoe_storage_simplified(&table1(), Money::new(-1.0), 365),
            Err(LcoeError::Validation(ValidationError::Negative {
                field: "average_price",
                ..
            }))
        ));
    }

    #[test]
    fn parity_cases() {
        let v = grid_parity(Money::new(225.55), Money::new(107.1)).unwrap();
        assert!(!v.at_parity);
        assert_eq!(v.margin.to_cents_string(), "-118.45");

        let v = grid_parity(Money::new(100.0), Money::new(100.0)).unwrap();
        assert!(v.at_parity);
        assert_eq!(v.margin.usd(), 0.0);

        let v = grid_parity(Money::ZERO, Money::new(50.0)).unwrap();
        assert!(v.at_parity);
        assert_eq!(v.margin.usd(), 50.0);

        assert!(grid_parity(Money::new(-1.0), Money::new(1.0)).is_err());
    }
}
