//! Levelized cost of energy (LCOE) for generation assets and energy storage.
//!
//! The crate is split into four layers:
//!
//! * [`model`] holds the domain types and their validation rules.
//! * [`engine`] is the pure calculation kernel: discounted generation LCOE, storage LCOE over an
//!   explicit dispatch schedule, the closed-form storage LCOE under canonical full daily cycling,
//!   and the grid-parity comparison.
//! * [`sensitivity`] produces one-dimensional sweep tables and min/avg/max technology ranges.
//! * [`io`] reads scenario files and price/schedule CSVs, and writes results as CSV, JSON or
//!   plot data.
pub mod engine;
pub mod io;
pub mod model;
pub mod sensitivity;

pub use engine::{
    canonical_schedule, check_ratings, grid_parity, lcoe_generation, lcoe_storage,
    lcoe_storage_simplified, Formulation, LcoeError, ParityVerdict,
};
pub use model::{
    DispatchSchedule, GenerationAsset, LcoeResult, Money, PriceSeries, StorageAsset,
    SweepParameter, SweepPoint, SweepTable, TechnologyRange, Validate, ValidationError,
    DEFAULT_DAYS_PER_YEAR, RELATIVE_TOLERANCE,
};
pub use sensitivity::{sweep, technology_range, ParamRange, SweepError, SweepSpec, TechnologySpec};
