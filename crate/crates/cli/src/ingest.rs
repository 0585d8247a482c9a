use std::fs::File;
use std::io::Write;

use anyhow::{bail, Context, Result};
use reset_hour_core::ingest::{
    parse_price_events, parse_traffic_counts, pool_profile, station_hourly_prices, traffic_weights, write_profile,
    Malformed,
};

use crate::config::RunConfig;
use crate::output::{key_values, prepare_dir, require, write_file};

pub const PRICE_PROFILE: &str = "price_profile.csv";
pub const TRAFFIC_WEIGHTS: &str = "traffic_weights.csv";

fn write_malformed(out: &mut dyn Write, rows: &[Malformed]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["line", "reason"])?;
    for m in rows {
        w.write_record([m.line.to_string(), m.reason.clone()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn prices(cfg: &RunConfig) -> Result<()> {
    let input = require(&cfg.prices, "prices")?;
    let ingest = cfg.ingestion()?;
    prepare_dir(&cfg.out_dir)?;

    let file = File::open(&input).with_context(|| format!("opening {}", input.display()))?;
    let parsed = parse_price_events(file, &ingest)?;
    write_file(&cfg.out_dir, "price_malformed.csv", |out| write_malformed(out, &parsed.malformed))?;
    let (rows, malformed) = (parsed.rows, parsed.malformed.len());
    let parsed = parsed.enforce_limit(ingest.malformed_limit_pct)?;
    if parsed.records.is_empty() {
        bail!("{}: no price events", input.display());
    }

    let (station_hours, diag) = station_hourly_prices(&parsed.records, &ingest);
    let profile = pool_profile(&station_hours, &ingest)?;
    let coverage = profile.coverage.expect("pooled profiles carry coverage");
    let (peak, trough) = (profile.max_hour(), profile.min_hour());
    let min_cov = coverage.iter().copied().fold(f64::INFINITY, f64::min);
    let max_cov = coverage.iter().copied().fold(0.0, f64::max);

    let path = write_file(&cfg.out_dir, PRICE_PROFILE, |out| {
        Ok(write_profile(out, &profile.prices, Some(&coverage))?)
    })?;
    write_file(&cfg.out_dir, "price_diagnostics.txt", |out| {
        key_values(
            out,
            &[
                ("rows", rows.to_string()),
                ("malformed_rows", malformed.to_string()),
                ("stations", diag.stations.to_string()),
                ("events_used", diag.events_used.to_string()),
                ("events_ignored", diag.events_ignored.to_string()),
                ("output_days", ingest.output_days().to_string()),
                ("stale_station_hours", diag.stale_station_hours.to_string()),
                ("max_level_age_hours", diag.max_level_age_hours.to_string()),
                ("coverage_min", min_cov.to_string()),
                ("coverage_max", max_cov.to_string()),
                ("peak_hour", peak.to_string()),
                ("peak_price", profile.prices[peak].to_string()),
                ("trough_hour", trough.to_string()),
                ("trough_price", profile.prices[trough].to_string()),
            ],
        )
    })?;

    println!(
        "price profile: peak {:.4} at {peak:02}:00, trough {:.4} at {trough:02}:00",
        profile.prices[peak], profile.prices[trough]
    );
    if diag.stale_station_hours > 0 {
        println!(
            "warning: {} station-hours carry a level older than {} h",
            diag.stale_station_hours, ingest.staleness_hours
        );
    }
    if cfg.verbosity > 0 {
        println!("{} rows, {malformed} malformed, {} stations", rows, diag.stations);
    }
    println!("wrote {}", path.display());
    Ok(())
}

pub fn traffic(cfg: &RunConfig) -> Result<()> {
    let input = require(&cfg.traffic, "traffic")?;
    let ingest = cfg.ingestion()?;
    prepare_dir(&cfg.out_dir)?;

    let file = File::open(&input).with_context(|| format!("opening {}", input.display()))?;
    let parsed = parse_traffic_counts(file, &ingest)?;
    write_file(&cfg.out_dir, "traffic_malformed.csv", |out| write_malformed(out, &parsed.malformed))?;
    let (rows, malformed) = (parsed.rows, parsed.malformed.len());
    let parsed = parsed.enforce_limit(ingest.malformed_limit_pct)?;
    if parsed.records.is_empty() {
        bail!("{}: no traffic counts", input.display());
    }

    let (weights, diag) = traffic_weights(&parsed.records, &ingest)?;
    let peak = (0..weights.values().len()).fold(0, |b, h| if weights.get(h) > weights.get(b) { h } else { b });

    let path = write_file(&cfg.out_dir, TRAFFIC_WEIGHTS, |out| {
        Ok(write_profile(out, weights.values(), Some(&diag.unflagged_share))?)
    })?;
    write_file(&cfg.out_dir, "traffic_diagnostics.txt", |out| {
        key_values(
            out,
            &[
                ("rows", rows.to_string()),
                ("malformed_rows", malformed.to_string()),
                ("stations", diag.stations.to_string()),
                ("records_used", diag.records_used.to_string()),
                ("unflagged_spread", diag.unflagged_spread.to_string()),
                ("spread_within_bound", diag.spread_within_bound.to_string()),
                ("peak_hour", peak.to_string()),
            ],
        )?;
        let totals: Vec<String> = diag.hourly_totals.iter().map(u64::to_string).collect();
        writeln!(out, "hourly_totals = {}", totals.join(","))?;
        Ok(())
    })?;

    println!("traffic weights: peak {:.4} at {peak:02}:00 from {} stations", weights.get(peak), diag.stations);
    if !diag.spread_within_bound {
        println!(
            "warning: unflagged share varies by {:.4} across hours (bound {})",
            diag.unflagged_spread, ingest.unflagged_spread_bound
        );
    }
    println!("wrote {}", path.display());
    Ok(())
}
