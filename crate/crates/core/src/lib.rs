//! Reset-hour analysis for a two-station Hotelling fuel market.
//!
//! Hourly retail prices are inverted into shares of price-sensitive
//! consumers, the symmetric equilibrium under a once-per-day price increase
//! is computed by weighted pool-adjacent-violators, and every candidate
//! reset hour is ranked by its traffic-weighted average price.

pub mod calibration;
pub mod error;
pub mod fixtures;
pub mod hours;
pub mod ingest;
pub mod model;
pub mod oracle;
pub mod sweep;

/// Clock hours in a day.
pub const HOURS: usize = 24;

pub use error::{Error, Result};
pub use model::{EquilibriumPath, LambdaProfile, ModelParams, WeightProfile};
