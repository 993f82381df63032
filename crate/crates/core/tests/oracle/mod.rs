//! Independent reference computations used by the integration and acceptance tests.
//!
//! These work on raw `f64` inputs and never call into the engine.
#![allow(dead_code, clippy::needless_range_loop)]

/// One line of a hand-built cash-flow table.
#[derive(Debug, Clone, Copy)]
pub struct CashFlowRow {
    pub cost: f64,
    pub energy: f64,
    pub coefficient: f64,
}

/// Generator LCOE from an explicit yearly cash-flow table: the investment is a year-1 cost,
/// every year carries fixed O&M plus per-MWh costs times that year's energy, and both columns
/// are multiplied by `1 / (1 + d)^(year - 1)` before summing.
pub fn generation_lcoe(
    investment: f64,
    fixed_per_year: f64,
    variable_per_mwh: f64,
    fuel_per_mwh: f64,
    energy: &[f64],
    discount_rate: f64,
) -> f64 {
    let rows: Vec<CashFlowRow> = energy
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let year = i as i32 + 1;
            let capital = if year == 1 { investment } else { 0.0 };
            CashFlowRow {
                cost: capital + fixed_per_year + variable_per_mwh * e + fuel_per_mwh * e,
                energy: e,
                coefficient: 1.0 / (1.0 + discount_rate).powi(year - 1),
            }
        })
        .collect();
    let mut cost = 0.0;
    let mut produced = 0.0;
    for row in &rows {
        cost += row.cost * row.coefficient;
        produced += row.energy * row.coefficient;
    }
    cost / produced
}

/// Storage LCOE by listing every numerator term separately (power capital, energy capital, one
/// charging-cost term per day) and every denominator term (one discharge per day).
pub fn storage_lcoe_terms(
    power_cost: f64,
    energy_cost: f64,
    rated_power: f64,
    rated_energy: f64,
    prices: &[f64],
    charge: &[f64],
    discharge: &[f64],
) -> f64 {
    assert_eq!(prices.len(), charge.len());
    assert_eq!(prices.len(), discharge.len());
    let mut numerator_terms = vec![power_cost * rated_power, energy_cost * rated_energy];
    for day in 0..prices.len() {
        numerator_terms.push(prices[day] * charge[day]);
    }
    let mut numerator = 0.0;
    for term in numerator_terms {
        numerator += term;
    }
    let mut denominator = 0.0;
    for day in 0..discharge.len() {
        denominator += discharge[day];
    }
    numerator / denominator
}

/// Storage LCOE on the canonical schedule, built day by day: each day charges `rated_energy`
/// and discharges `efficiency * rated_energy`.
pub fn storage_lcoe_canonical(
    power_cost: f64,
    energy_cost: f64,
    rated_power: f64,
    rated_energy: f64,
    efficiency: f64,
    price: f64,
    days: usize,
) -> f64 {
    let prices = vec![price; days];
    let charge = vec![rated_energy; days];
    let discharge: Vec<f64> = charge.iter().map(|c| efficiency * c).collect();
    storage_lcoe_terms(
        power_cost,
        energy_cost,
        rated_power,
        rated_energy,
        &prices,
        &charge,
        &discharge,
    )
}

pub fn relative_error(actual: f64, expected: f64) -> f64 {
    if expected == 0.0 {
        actual.abs()
    } else {
        ((actual - expected) / expected).abs()
    }
}
