use chrono::{Datelike, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DayFilter {
    Weekday,
    Weekend,
    All,
}

impl DayFilter {
    pub fn matches(self, date: NaiveDate) -> bool {
        let weekend = matches!(date.weekday(), Weekday::Sat | Weekday::Sun);
        match self {
            DayFilter::Weekday => !weekend,
            DayFilter::Weekend => weekend,
            DayFilter::All => true,
        }
    }
}

impl std::str::FromStr for DayFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "weekday" | "weekdays" => Ok(DayFilter::Weekday),
            "weekend" | "weekends" => Ok(DayFilter::Weekend),
            "all" => Ok(DayFilter::All),
            other => Err(Error::Input(format!("unknown day filter '{other}'"))),
        }
    }
}

/// Header names of the price-event columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PriceColumns {
    pub station: String,
    pub timestamp: String,
    pub price: String,
}

impl Default for PriceColumns {
    fn default() -> Self {
        Self {
            station: "station_id".into(),
            timestamp: "timestamp".into(),
            price: "price".into(),
        }
    }
}

/// Header names of the traffic-count columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrafficColumns {
    pub station: String,
    pub date: String,
    pub hour: String,
    pub cars_dir1: String,
    pub status_dir1: String,
    pub cars_dir2: String,
    pub status_dir2: String,
}

impl Default for TrafficColumns {
    fn default() -> Self {
        Self {
            station: "station_id".into(),
            date: "date".into(),
            hour: "hour".into(),
            cars_dir1: "cars_dir1".into(),
            status_dir1: "status_dir1".into(),
            cars_dir2: "cars_dir2".into(),
            status_dir2: "status_dir2".into(),
        }
    }
}

/// Settings for turning raw feeds into hourly profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestionConfig {
    pub window_start: NaiveDate,
    pub window_end: NaiveDate,
    pub day_filter: DayFilter,
    /// Calendar days before `window_start` whose events only initialize levels.
    pub warmup_days: u32,
    /// Carry the closing level of a Saturday or Sunday into the next day.
    pub carry_weekend: bool,
    /// Carry the closing level of a Monday..Friday into the next day.
    pub carry_weekday: bool,
    /// Carried levels older than this are reported as stale.
    pub staleness_hours: f64,
    /// Percentage of malformed rows above which parsing fails.
    pub malformed_limit_pct: f64,
    pub price_columns: PriceColumns,
    pub traffic_columns: TrafficColumns,
    /// Status tokens that mark a count as unflagged (compared trimmed, case-insensitive).
    pub unflagged_tokens: Vec<String>,
    /// Value of the first hour in the traffic file (0 or 1).
    pub traffic_hour_base: u32,
    /// Optional date range for traffic records; `None` keeps every date.
    pub traffic_window: Option<(NaiveDate, NaiveDate)>,
    /// Largest tolerated spread of the per-hour unflagged share.
    pub unflagged_spread_bound: f64,
}

impl IngestionConfig {
    pub fn new(window_start: NaiveDate, window_end: NaiveDate) -> Result<Self> {
        if window_start > window_end {
            return Err(Error::Input(format!(
                "window start {window_start} is after window end {window_end}"
            )));
        }
        Ok(Self {
            window_start,
            window_end,
            day_filter: DayFilter::Weekday,
            warmup_days: 1,
            carry_weekend: true,
            carry_weekday: true,
            staleness_hours: 72.0,
            malformed_limit_pct: 1.0,
            price_columns: PriceColumns::default(),
            traffic_columns: TrafficColumns::default(),
            unflagged_tokens: vec!["ok".into(), "-".into(), String::new()],
            traffic_hour_base: 0,
            traffic_window: None,
            unflagged_spread_bound: 0.01,
        })
    }

    pub fn warmup_start(&self) -> NaiveDate {
        self.window_start - chrono::Duration::days(i64::from(self.warmup_days))
    }

    /// Whether `date` contributes output rows.
    pub fn is_output_day(&self, date: NaiveDate) -> bool {
        date >= self.window_start && date <= self.window_end && self.day_filter.matches(date)
    }

    pub fn output_days(&self) -> usize {
        self.window_start
            .iter_days()
            .take_while(|d| *d <= self.window_end)
            .filter(|d| self.day_filter.matches(*d))
            .count()
    }

    /// Whether the closing level of `prev` carries into the following day.
    pub fn carries_from(&self, prev: NaiveDate) -> bool {
        if matches!(prev.weekday(), Weekday::Sat | Weekday::Sun) {
            self.carry_weekend
        } else {
            self.carry_weekday
        }
    }

    pub fn is_unflagged(&self, token: &str) -> bool {
        let t = token.trim();
        self.unflagged_tokens.iter().any(|u| u.trim().eq_ignore_ascii_case(t))
    }
}
