//! Hourly passenger-car counts to normalized demand weights.

use std::collections::BTreeSet;
use std::io::Read;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::config::IngestionConfig;
use super::parse::{column, reader, Malformed, ParseOutcome};
use crate::error::{Error, Result};
use crate::model::WeightProfile;
use crate::HOURS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TrafficDirection {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrafficRecord {
    pub station_id: String,
    pub date: NaiveDate,
    pub clock_hour: usize,
    pub direction: TrafficDirection,
    pub car_count: u64,
    pub status_flag: String,
}

pub fn parse_date(raw: &str) -> Option<NaiveDate> {
    let raw = raw.trim();
    ["%Y-%m-%d", "%Y%m%d", "%y%m%d", "%d.%m.%Y"]
        .iter()
        .find_map(|fmt| NaiveDate::parse_from_str(raw, fmt).ok())
}

/// One record per direction with a count; empty count cells are skipped.
pub fn parse_traffic_counts<R: Read>(input: R, config: &IngestionConfig) -> Result<ParseOutcome<TrafficRecord>> {
    let mut rdr = reader(input);
    let headers = rdr.headers()?.clone();
    let cols = &config.traffic_columns;
    let idx = [
        column(&headers, &cols.station)?,
        column(&headers, &cols.date)?,
        column(&headers, &cols.hour)?,
        column(&headers, &cols.cars_dir1)?,
        column(&headers, &cols.status_dir1)?,
        column(&headers, &cols.cars_dir2)?,
        column(&headers, &cols.status_dir2)?,
    ];

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
        match traffic_row(&record, &idx, config.traffic_hour_base) {
            Ok(recs) => out.records.extend(recs),
            Err(reason) => out.malformed.push(Malformed { line, reason }),
        }
    }
    out.enforce_limit(config.malformed_limit_pct)
}

fn traffic_row(rec: &csv::StringRecord, idx: &[usize; 7], hour_base: u32) -> Result<Vec<TrafficRecord>, String> {
    let field = |i: usize| rec.get(idx[i]).ok_or_else(|| format!("missing field {}", idx[i] + 1));
    let station_id = field(0)?;
    if station_id.is_empty() {
        return Err("empty station id".into());
    }
    let raw_date = field(1)?;
    let date = parse_date(raw_date).ok_or_else(|| format!("bad date '{raw_date}'"))?;
    let raw_hour = field(2)?;
    let hour: u32 = raw_hour.parse().map_err(|_| format!("bad hour '{raw_hour}'"))?;
    let clock_hour = hour
        .checked_sub(hour_base)
        .filter(|h| (*h as usize) < HOURS)
        .ok_or_else(|| format!("hour {hour} out of range"))? as usize;

    let mut out = Vec::with_capacity(2);
    for (direction, cars, status) in [(TrafficDirection::First, 3, 4), (TrafficDirection::Second, 5, 6)] {
        let raw = field(cars)?;
        if raw.is_empty() {
            continue;
        }
        let car_count: u64 = raw.parse().map_err(|_| format!("bad car count '{raw}'"))?;
        out.push(TrafficRecord {
            station_id: station_id.to_string(),
            date,
            clock_hour,
            direction,
            car_count,
            status_flag: field(status)?.to_string(),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficDiagnostics {
    /// Unflagged share of direction-records per clock hour.
    pub unflagged_share: [f64; HOURS],
    /// Max minus min of `unflagged_share`.
    pub unflagged_spread: f64,
    pub spread_within_bound: bool,
    /// Counting stations contributing at least one unflagged record.
    pub stations: usize,
    pub records_used: usize,
    pub hourly_totals: [u64; HOURS],
}

/// Weights `Q_t / sum_s Q_s` from unflagged counts on matching days.
pub fn traffic_weights(records: &[TrafficRecord], config: &IngestionConfig) -> Result<(WeightProfile, TrafficDiagnostics)> {
    let mut totals = [0u64; HOURS];
    let mut seen = [0usize; HOURS];
    let mut kept = [0usize; HOURS];
    let mut stations = BTreeSet::new();
    let in_window = |d: NaiveDate| config.traffic_window.is_none_or(|(a, b)| d >= a && d <= b);

    for r in records
        .iter()
        .filter(|r| config.day_filter.matches(r.date) && in_window(r.date))
    {
        seen[r.clock_hour] += 1;
        if config.is_unflagged(&r.status_flag) {
            kept[r.clock_hour] += 1;
            totals[r.clock_hour] += r.car_count;
            stations.insert(r.station_id.as_str());
        }
    }
    if let Some(hour) = totals.iter().position(|&q| q == 0) {
        return Err(Error::MissingCoverage { hour });
    }
    let weights = WeightProfile::from_raw(totals.map(|q| q as f64))?;

    let unflagged_share: [f64; HOURS] = std::array::from_fn(|h| kept[h] as f64 / seen[h] as f64);
    let lo = unflagged_share.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = unflagged_share.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((
        weights,
        TrafficDiagnostics {
            unflagged_share,
            unflagged_spread: hi - lo,
            spread_within_bound: hi - lo <= config.unflagged_spread_bound,
            stations: stations.len(),
            records_used: kept.iter().sum(),
            hourly_totals: totals,
        },
    ))
}
