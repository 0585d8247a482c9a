//! Run configuration: a flat `key = value` file overridden by flags.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use chrono::NaiveDate;
use reset_hour_core::fixtures::{BASELINE_COST, COST_GRID};
use reset_hour_core::ingest::{DayFilter, IngestionConfig};
use reset_hour_core::sweep::Units;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub prices: Option<PathBuf>,
    pub traffic: Option<PathBuf>,
    pub profile: Option<PathBuf>,
    pub weights: Option<PathBuf>,
    pub paths: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub window_start: Option<NaiveDate>,
    pub window_end: Option<NaiveDate>,
    pub day_filter: DayFilter,
    pub c: f64,
    pub c_grid: Vec<f64>,
    pub v: Option<f64>,
    pub units: Units,
    pub verbosity: u8,

    pub warmup_days: u32,
    pub carry_weekend: bool,
    pub carry_weekday: bool,
    pub staleness_hours: f64,
    pub malformed_limit_pct: f64,
    pub price_col_station: String,
    pub price_col_timestamp: String,
    pub price_col_price: String,
    pub traffic_col_station: String,
    pub traffic_col_date: String,
    pub traffic_col_hour: String,
    pub traffic_col_cars_dir1: String,
    pub traffic_col_status_dir1: String,
    pub traffic_col_cars_dir2: String,
    pub traffic_col_status_dir2: String,
    pub unflagged_tokens: Vec<String>,
    pub traffic_hour_base: u32,
    pub traffic_window_start: Option<NaiveDate>,
    pub traffic_window_end: Option<NaiveDate>,
    pub unflagged_spread_bound: f64,

    pub seed: u64,
    pub random_instances: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let ingest = IngestionConfig::new(NaiveDate::MIN, NaiveDate::MIN).expect("equal dates");
        Self {
            prices: None,
            traffic: None,
            profile: None,
            weights: None,
            paths: None,
            out_dir: PathBuf::from("out"),
            window_start: None,
            window_end: None,
            day_filter: DayFilter::Weekday,
            c: BASELINE_COST,
            c_grid: COST_GRID.to_vec(),
            v: None,
            units: Units::Cent,
            verbosity: 0,
            warmup_days: ingest.warmup_days,
            carry_weekend: ingest.carry_weekend,
            carry_weekday: ingest.carry_weekday,
            staleness_hours: ingest.staleness_hours,
            malformed_limit_pct: ingest.malformed_limit_pct,
            price_col_station: ingest.price_columns.station,
            price_col_timestamp: ingest.price_columns.timestamp,
            price_col_price: ingest.price_columns.price,
            traffic_col_station: ingest.traffic_columns.station,
            traffic_col_date: ingest.traffic_columns.date,
            traffic_col_hour: ingest.traffic_columns.hour,
            traffic_col_cars_dir1: ingest.traffic_columns.cars_dir1,
            traffic_col_status_dir1: ingest.traffic_columns.status_dir1,
            traffic_col_cars_dir2: ingest.traffic_columns.cars_dir2,
            traffic_col_status_dir2: ingest.traffic_columns.status_dir2,
            unflagged_tokens: ingest.unflagged_tokens,
            traffic_hour_base: ingest.traffic_hour_base,
            traffic_window_start: None,
            traffic_window_end: None,
            unflagged_spread_bound: ingest.unflagged_spread_bound,
            seed: 42,
            random_instances: 100,
        }
    }
}

fn parse_date(v: &str) -> Result<NaiveDate> {
    v.parse().with_context(|| format!("bad date '{v}'"))
}

fn parse_bool(v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => bail!("bad boolean '{v}'"),
    }
}

pub fn parse_grid(v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().with_context(|| format!("bad cost '{s}'")))
        .collect()
}

fn list(v: &str) -> Vec<String> {
    v.split(',').map(|s| s.trim().to_string()).collect()
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let path = || Some(PathBuf::from(v));
        let num = |v: &str| v.parse::<f64>().with_context(|| format!("bad number '{v}' for {key}"));
        match key {
            "prices" => self.prices = path(),
            "traffic" => self.traffic = path(),
            "profile" => self.profile = path(),
            "weights" => self.weights = path(),
            "paths" => self.paths = path(),
            "out_dir" => self.out_dir = PathBuf::from(v),
            "window_start" => self.window_start = Some(parse_date(v)?),
            "window_end" => self.window_end = Some(parse_date(v)?),
            "day_filter" => self.day_filter = v.parse()?,
            "c" => self.c = num(v)?,
            "c_grid" => self.c_grid = parse_grid(v)?,
            "v" => self.v = Some(num(v)?),
            "units" => self.units = v.parse()?,
            "verbosity" => self.verbosity = v.parse().with_context(|| format!("bad verbosity '{v}'"))?,
            "warmup_days" => self.warmup_days = v.parse().with_context(|| format!("bad warmup_days '{v}'"))?,
            "carry_weekend" => self.carry_weekend = parse_bool(v)?,
            "carry_weekday" => self.carry_weekday = parse_bool(v)?,
            "staleness_hours" => self.staleness_hours = num(v)?,
            "malformed_limit_pct" => self.malformed_limit_pct = num(v)?,
            "price_col_station" => self.price_col_station = v.into(),
            "price_col_timestamp" => self.price_col_timestamp = v.into(),
            "price_col_price" => self.price_col_price = v.into(),
            "traffic_col_station" => self.traffic_col_station = v.into(),
            "traffic_col_date" => self.traffic_col_date = v.into(),
            "traffic_col_hour" => self.traffic_col_hour = v.into(),
            "traffic_col_cars_dir1" => self.traffic_col_cars_dir1 = v.into(),
            "traffic_col_status_dir1" => self.traffic_col_status_dir1 = v.into(),
            "traffic_col_cars_dir2" => self.traffic_col_cars_dir2 = v.into(),
            "traffic_col_status_dir2" => self.traffic_col_status_dir2 = v.into(),
            "unflagged_tokens" => self.unflagged_tokens = list(v),
            "traffic_hour_base" => {
                self.traffic_hour_base = v.parse().with_context(|| format!("bad traffic_hour_base '{v}'"))?
            }
            "traffic_window_start" => self.traffic_window_start = Some(parse_date(v)?),
            "traffic_window_end" => self.traffic_window_end = Some(parse_date(v)?),
            "unflagged_spread_bound" => self.unflagged_spread_bound = num(v)?,
            "seed" => self.seed = v.parse().with_context(|| format!("bad seed '{v}'"))?,
            "random_instances" => {
                self.random_instances = v.parse().with_context(|| format!("bad random_instances '{v}'"))?
            }
            other => bail!("unknown config key '{other}'"),
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment. Relative paths are
    /// resolved against `base`.
    pub fn apply_text(&mut self, text: &str, base: Option<&Path>) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("config line {}: expected key = value", i + 1))?;
            self.set(key.trim(), value)
                .with_context(|| format!("config line {}", i + 1))?;
        }
        if let Some(base) = base {
            for p in [
                &mut self.prices,
                &mut self.traffic,
                &mut self.profile,
                &mut self.weights,
                &mut self.paths,
            ]
            .into_iter()
            .flatten()
            {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
            if self.out_dir.is_relative() {
                self.out_dir = base.join(&self.out_dir);
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text, path.parent())?;
        Ok(cfg)
    }

    pub fn ingestion(&self) -> Result<IngestionConfig> {
        let (start, end) = match (self.window_start, self.window_end) {
            (Some(s), Some(e)) => (s, e),
            _ => bail!("window_start and window_end are required"),
        };
        let mut cfg = IngestionConfig::new(start, end)?;
        cfg.day_filter = self.day_filter;
        cfg.warmup_days = self.warmup_days;
        cfg.carry_weekend = self.carry_weekend;
        cfg.carry_weekday = self.carry_weekday;
        cfg.staleness_hours = self.staleness_hours;
        cfg.malformed_limit_pct = self.malformed_limit_pct;
        cfg.price_columns.station = self.price_col_station.clone();
        cfg.price_columns.timestamp = self.price_col_timestamp.clone();
        cfg.price_columns.price = self.price_col_price.clone();
        cfg.traffic_columns.station = self.traffic_col_station.clone();
        cfg.traffic_columns.date = self.traffic_col_date.clone();
        cfg.traffic_columns.hour = self.traffic_col_hour.clone();
        cfg.traffic_columns.cars_dir1 = self.traffic_col_cars_dir1.clone();
        cfg.traffic_columns.status_dir1 = self.traffic_col_status_dir1.clone();
        cfg.traffic_columns.cars_dir2 = self.traffic_col_cars_dir2.clone();
        cfg.traffic_columns.status_dir2 = self.traffic_col_status_dir2.clone();
        cfg.unflagged_tokens = self.unflagged_tokens.clone();
        cfg.traffic_hour_base = self.traffic_hour_base;
        cfg.unflagged_spread_bound = self.unflagged_spread_bound;
        cfg.traffic_window = match (self.traffic_window_start, self.traffic_window_end) {
            (Some(a), Some(b)) => Some((a, b)),
            (None, None) => None,
            _ => bail!("traffic_window_start and traffic_window_end go together"),
        };
        Ok(cfg)
    }

    /// Baseline cost followed by the grid values not equal to it.
    pub fn costs(&self) -> Vec<f64> {
        let mut out = vec![self.c];
        out.extend(self.c_grid.iter().copied().filter(|&g| g != self.c));
        out
    }
}
