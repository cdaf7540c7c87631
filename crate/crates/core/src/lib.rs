//! Post-storm repair prioritization for radial distribution feeders.
//!
//! The pipeline turns a wind speed into damaged-pole counts through
//! lifetime-class fragility curves, converts damage into repair times, and
//! values every line by the outage cost it and everything downstream of it
//! carry while it waits for repair. Lines are ranked within each feeder and
//! feeders are ranked against each other.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix it to `f64`, with `*32` variants for `f32`.

pub mod bundled;
pub mod damage;
pub mod fragility;
pub mod grid;
pub mod scalar;
pub mod scenario;
pub mod valuation;

pub use scalar::{Rounding, Scalar};

pub type Bus = grid::Bus<f64>;
pub type Line = grid::Line<f64>;
pub type Network = grid::Network<f64>;
pub type LifetimeClass = fragility::LifetimeClass<f64>;
pub type ClassTable = fragility::ClassTable<f64>;
pub type ClassDamage = damage::ClassDamage<f64>;
pub type LineDamage = damage::LineDamage<f64>;
pub type RepairParams = damage::RepairParams<f64>;
pub type Assessment = valuation::Assessment<f64>;
pub type LineValuation = valuation::LineValuation<f64>;
pub type FeederValuation = valuation::FeederValuation<f64>;
pub type Dataset = scenario::Dataset<f64>;
pub type ScenarioConfig = scenario::ScenarioConfig<f64>;

pub type Network32 = grid::Network<f32>;
pub type ClassTable32 = fragility::ClassTable<f32>;
pub type Assessment32 = valuation::Assessment<f32>;
pub type Dataset32 = scenario::Dataset<f32>;
pub type ScenarioConfig32 = scenario::ScenarioConfig<f32>;
