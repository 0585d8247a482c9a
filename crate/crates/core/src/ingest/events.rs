//! Station price-change events to pooled hourly prices.
//!
//! A station's price is piecewise constant between recorded changes. Each
//! station-hour gets the time-weighted mean of the levels in force, and the
//! pooled profile weights station-hours by the seconds they were observed.

use std::collections::BTreeMap;
use std::io::Read;

use chrono::{DateTime, NaiveDate, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};

use super::config::IngestionConfig;
use super::parse::{column, reader, Malformed, ParseOutcome};
use crate::calibration::PriceProfile;
use crate::error::{Error, Result};
use crate::HOURS;

const DAY_SECONDS: u32 = 86_400;
const HOUR_SECONDS: u32 = 3_600;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceEvent {
    pub station_id: String,
    /// Local clock time.
    pub timestamp: NaiveDateTime,
    pub price: f64,
}

/// Parses a local timestamp; a trailing UTC offset is accepted and dropped.
pub fn parse_timestamp(raw: &str) -> Option<NaiveDateTime> {
    let raw = raw.trim();
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(raw, fmt) {
            return Some(t);
        }
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%#z", "%Y-%m-%d %H:%M:%S%#z"] {
        if let Ok(t) = DateTime::parse_from_str(raw, fmt) {
            return Some(t.naive_local());
        }
    }
    None
}

pub fn parse_price_events<R: Read>(input: R, config: &IngestionConfig) -> Result<ParseOutcome<PriceEvent>> {
    let mut rdr = reader(input);
    let headers = rdr.headers()?.clone();
    let cols = &config.price_columns;
    let (i_station, i_time, i_price) = (
        column(&headers, &cols.station)?,
        column(&headers, &cols.timestamp)?,
        column(&headers, &cols.price)?,
    );

    let mut out = ParseOutcome {
        records: Vec::new(),
        rows: 0,
        malformed: Vec::new(),
    };
    let mut record = csv::StringRecord::new();
    loop {
        let line = rdr.position().line();
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) if e.is_io_error() => return Err(e.into()),
            Err(e) => {
                out.rows += 1;
                out.malformed.push(Malformed {
                    line,
                    reason: e.to_string(),
                });
                continue;
            }
        }
        out.rows += 1;
        let line = record.position().map_or(line, |p| p.line());
        match price_event(&record, i_station, i_time, i_price) {
            Ok(ev) => out.records.push(ev),
            Err(reason) => out.malformed.push(Malformed { line, reason }),
        }
    }
    out.enforce_limit(config.malformed_limit_pct)
}

fn price_event(rec: &csv::StringRecord, i_station: usize, i_time: usize, i_price: usize) -> Result<PriceEvent, String> {
    let field = |i: usize| rec.get(i).ok_or_else(|| format!("missing field {}", i + 1));
    let station_id = field(i_station)?;
    if station_id.is_empty() {
        return Err("empty station id".into());
    }
    let raw_time = field(i_time)?;
    let timestamp = parse_timestamp(raw_time).ok_or_else(|| format!("bad timestamp '{raw_time}'"))?;
    let raw_price = field(i_price)?;
    let price: f64 = raw_price.parse().map_err(|_| format!("bad price '{raw_price}'"))?;
    if !(price.is_finite() && price > 0.0) {
        return Err(format!("price must be positive, got {price}"));
    }
    Ok(PriceEvent {
        station_id: station_id.to_string(),
        timestamp,
        price,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationHourPrice {
    pub station_id: String,
    pub date: NaiveDate,
    pub clock_hour: usize,
    pub mean_price: f64,
    pub covered_seconds: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AggregationDiagnostics {
    pub stations: usize,
    pub events_used: usize,
    /// Events outside the window plus warm-up.
    pub events_ignored: usize,
    /// Output station-hours whose level at the top of the hour was set more
    /// than `staleness_hours` earlier.
    pub stale_station_hours: usize,
    pub max_level_age_hours: f64,
}

fn seconds_of_day(t: &NaiveDateTime) -> u32 {
    t.time().num_seconds_from_midnight()
}

/// Time-weighted station-hour prices for every output day of the window.
pub fn station_hourly_prices(
    events: &[PriceEvent],
    config: &IngestionConfig,
) -> (Vec<StationHourPrice>, AggregationDiagnostics) {
    let first_day = config.warmup_start();
    let mut diag = AggregationDiagnostics::default();
    let mut by_station: BTreeMap<&str, Vec<&PriceEvent>> = BTreeMap::new();
    for ev in events {
        let day = ev.timestamp.date();
        if day < first_day || day > config.window_end {
            diag.events_ignored += 1;
            continue;
        }
        diag.events_used += 1;
        by_station.entry(ev.station_id.as_str()).or_default().push(ev);
    }
    diag.stations = by_station.len();

    let mut rows = Vec::new();
    for (station, mut evs) in by_station {
        // stable: equal timestamps keep file order, so the last one wins
        evs.sort_by_key(|e| e.timestamp);
        station_rows(station, &evs, config, &mut rows, &mut diag);
    }
    (rows, diag)
}

fn station_rows(
    station: &str,
    evs: &[&PriceEvent],
    config: &IngestionConfig,
    rows: &mut Vec<StationHourPrice>,
    diag: &mut AggregationDiagnostics,
) {
    // (price, time the level was set)
    let mut level: Option<(f64, NaiveDateTime)> = None;
    let mut next = 0;
    let mut day = evs[0].timestamp.date();
    while day <= config.window_end {
        let output = config.is_output_day(day);
        let mut sums = [0.0f64; HOURS];
        let mut covered = [0u32; HOURS];
        let mut stale_at_top = [false; HOURS];

        let mut cursor = 0u32;
        let day_start = day.and_hms_opt(0, 0, 0).expect("midnight exists");
        loop {
            let (until, upcoming) = match evs.get(next) {
                Some(e) if e.timestamp.date() == day => (seconds_of_day(&e.timestamp), Some(*e)),
                _ => (DAY_SECONDS, None),
            };
            if output {
                if let Some((price, since)) = level {
                    accumulate(cursor, until, price, &mut sums, &mut covered);
                    for h in (cursor.div_ceil(HOUR_SECONDS) as usize)..HOURS {
                        let top = h as u32 * HOUR_SECONDS;
                        if top >= until {
                            break;
                        }
                        let age = (day_start + chrono::Duration::seconds(i64::from(top)) - since).num_seconds() as f64
                            / 3600.0;
                        diag.max_level_age_hours = diag.max_level_age_hours.max(age);
                        if age > config.staleness_hours {
                            stale_at_top[h] = true;
                        }
                    }
                }
            }
            match upcoming {
                Some(e) => {
                    level = Some((e.price, e.timestamp));
                    cursor = until;
                    next += 1;
                }
                None => break,
            }
        }

        if output {
            for h in 0..HOURS {
                if covered[h] > 0 {
                    if stale_at_top[h] {
                        diag.stale_station_hours += 1;
                    }
                    rows.push(StationHourPrice {
                        station_id: station.to_string(),
                        date: day,
                        clock_hour: h,
                        mean_price: sums[h] / f64::from(covered[h]),
                        covered_seconds: covered[h],
                    });
                }
            }
        }
        if !config.carries_from(day) {
            level = None;
        }
        day = day.succ_opt().expect("date in range");
    }
}

/// Adds the constant level `price` over seconds `[from, to)` of the day.
fn accumulate(from: u32, to: u32, price: f64, sums: &mut [f64; HOURS], covered: &mut [u32; HOURS]) {
    let mut t = from;
    while t < to {
        let h = (t / HOUR_SECONDS) as usize;
        let end = to.min((h as u32 + 1) * HOUR_SECONDS);
        let dur = end - t;
        sums[h] += price * f64::from(dur);
        covered[h] += dur;
        t = end;
    }
}

/// Pools station-hours by clock hour, weighting by covered seconds.
///
/// Coverage metadata is the average observed station count per hour,
/// station-seconds over `3600 x` output days.
pub fn pool_profile(rows: &[StationHourPrice], config: &IngestionConfig) -> Result<PriceProfile> {
    let mut weighted = [0.0f64; HOURS];
    let mut seconds = [0.0f64; HOURS];
    for row in rows.iter().filter(|r| config.is_output_day(r.date)) {
        let s = f64::from(row.covered_seconds);
        weighted[row.clock_hour] += row.mean_price * s;
        seconds[row.clock_hour] += s;
    }
    if let Some(hour) = seconds.iter().position(|&s| s == 0.0) {
        return Err(Error::MissingCoverage { hour });
    }
    let days = config.output_days().max(1) as f64;
    let prices: [f64; HOURS] = std::array::from_fn(|h| weighted[h] / seconds[h]);
    let coverage = seconds.map(|s| s / (f64::from(HOUR_SECONDS) * days));
    Ok(PriceProfile::new(prices)?.with_coverage(coverage))
}
