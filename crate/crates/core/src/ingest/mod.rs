//! Raw feeds to hourly profiles: price-change events and traffic counts.

pub mod config;
pub mod events;
pub mod parse;
pub mod profile_io;
pub mod traffic;

pub use config::{DayFilter, IngestionConfig, PriceColumns, TrafficColumns};
pub use events::{
    parse_price_events, pool_profile, station_hourly_prices, AggregationDiagnostics, PriceEvent,
    StationHourPrice,
};
pub use parse::{Malformed, ParseOutcome};
pub use profile_io::{read_profile, write_profile, ProfileFile};
pub use traffic::{parse_traffic_counts, traffic_weights, TrafficDiagnostics, TrafficDirection, TrafficRecord};
