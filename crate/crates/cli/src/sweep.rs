use std::io::Write;

use anyhow::{Context, Result};
use reset_hour_core::calibration::{infer_lambda, lambda_band, CalibrationResult, PriceProfile};
use reset_hour_core::model::{check_interiority, ModelParams};
use reset_hour_core::sweep::{sweep_all, write_paths, write_ranking, SweepResult};
use reset_hour_core::{WeightProfile, HOURS};

use crate::config::RunConfig;
use crate::output::{key_values, load_prices, load_weights, prepare_dir, require, write_file};

/// One calibrated sweep at a given marginal cost.
pub struct CostRun {
    pub c: f64,
    pub calibration: CalibrationResult,
    pub sweep: SweepResult,
}

pub fn run_costs(cfg: &RunConfig, profile: &PriceProfile, weights: &WeightProfile) -> Result<Vec<CostRun>> {
    cfg.costs()
        .into_iter()
        .map(|c| {
            let calibration = infer_lambda(profile, c).with_context(|| format!("calibrating at c = {c}"))?;
            let sweep = sweep_all(&calibration.params, &calibration.lambdas, weights)?;
            Ok(CostRun { c, calibration, sweep })
        })
        .collect()
}

fn csv_rows(out: &mut dyn Write, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(cfg: &RunConfig) -> Result<()> {
    let profile = load_prices(&require(&cfg.profile, "profile")?)?;
    let weights = load_weights(&require(&cfg.weights, "weights")?)?;
    prepare_dir(&cfg.out_dir)?;
    let units = cfg.units;

    let runs = run_costs(cfg, &profile, &weights)?;
    let base = &runs[0];
    let uniform = sweep_all(&base.calibration.params, &base.calibration.lambdas, &WeightProfile::uniform())?;
    let best = base.sweep.optimal();
    let stable = runs.iter().all(|r| r.sweep.optimal_hour == base.sweep.optimal_hour);
    let calibrations: Vec<CalibrationResult> = runs.iter().map(|r| r.calibration.clone()).collect();
    let band = lambda_band(&calibrations).expect("at least the baseline calibration");

    let dir = &cfg.out_dir;
    write_file(dir, "ranking.csv", |out| Ok(write_ranking(out, &base.sweep, units)?))?;
    write_file(dir, "ranking_equal_weight.csv", |out| Ok(write_ranking(out, &uniform, units)?))?;
    write_file(dir, "paths.csv", |out| Ok(write_paths(out, &base.sweep)?))?;
    for r in &runs[1..] {
        write_file(dir, &format!("ranking_c{}.csv", r.c), |out| Ok(write_ranking(out, &r.sweep, units)?))?;
    }

    let sfx = units.suffix();
    let grid_header = [
        "c".to_string(),
        "tau".to_string(),
        "optimal_hour".to_string(),
        format!("weighted_avg{sfx}"),
        format!("saving{sfx}"),
        format!("unrestricted_avg{sfx}"),
        format!("flat_bound{sfx}"),
    ];
    let grid_header: Vec<&str> = grid_header.iter().map(String::as_str).collect();
    write_file(dir, "grid_summary.csv", |out| {
        csv_rows(
            out,
            &grid_header,
            runs.iter().map(|r| {
                let e = r.sweep.optimal();
                vec![
                    r.c.to_string(),
                    r.calibration.params.tau.to_string(),
                    e.reset_hour.to_string(),
                    units.format(e.weighted_avg),
                    units.format(e.saving),
                    units.format(r.sweep.unrestricted_avg),
                    units.format(r.sweep.bound),
                ]
            }),
        )
    })?;

    write_file(dir, "plot_price_profile.csv", |out| {
        csv_rows(
            out,
            &["hour", "price", "coverage"],
            (0..HOURS).map(|h| {
                let cov = profile.coverage.map(|c| c[h].to_string()).unwrap_or_default();
                vec![h.to_string(), profile.prices[h].to_string(), cov]
            }),
        )
    })?;
    write_file(dir, "plot_lambda_band.csv", |out| {
        csv_rows(
            out,
            &["hour", "lambda", "lambda_low", "lambda_high"],
            (0..HOURS).map(|h| {
                vec![
                    h.to_string(),
                    base.calibration.lambdas.get(h).to_string(),
                    band[h].0.to_string(),
                    band[h].1.to_string(),
                ]
            }),
        )
    })?;
    write_file(dir, "plot_weights.csv", |out| {
        csv_rows(
            out,
            &["hour", "weight"],
            (0..HOURS).map(|h| vec![h.to_string(), weights.get(h).to_string()]),
        )
    })?;
    write_file(dir, "plot_paths.csv", |out| {
        csv_rows(
            out,
            &["hour", "observed", "regulated"],
            (0..HOURS).map(|h| {
                vec![
                    h.to_string(),
                    profile.prices[h].to_string(),
                    best.path.prices_clock[h].to_string(),
                ]
            }),
        )
    })?;

    let optimal_hours: Vec<String> = runs.iter().map(|r| r.sweep.optimal_hour.to_string()).collect();
    let mut summary = vec![
        ("c", base.c.to_string()),
        ("tau", base.calibration.params.tau.to_string()),
        ("min_price_hour", base.calibration.min_hour.to_string()),
        ("optimal_hour", best.reset_hour.to_string()),
        ("optimal_blocks", best.block_count.to_string()),
        ("weighted_avg", best.weighted_avg.to_string()),
        ("saving", best.saving.to_string()),
        ("unrestricted_avg", base.sweep.unrestricted_avg.to_string()),
        ("flat_bound", base.sweep.bound.to_string()),
        ("equal_weight_optimal_hour", uniform.optimal_hour.to_string()),
        ("equal_weight_saving", uniform.optimal().saving.to_string()),
        ("grid_optimal_hours", optimal_hours.join(",")),
        ("stable_across_grid", stable.to_string()),
    ];
    let interiority = cfg
        .v
        .map(|v| {
            let params = ModelParams::with_reservation(base.c, base.calibration.params.tau, Some(v))?;
            anyhow::Ok(check_interiority(&best.path, &params))
        })
        .transpose()?;
    if let Some(rep) = &interiority {
        summary.push(("interior", rep.interior.to_string()));
    }
    write_file(dir, "summary.txt", |out| key_values(out, &summary))?;

    println!(
        "optimal reset hour: {:02}:00, saving {} {}",
        best.reset_hour,
        units.format(best.saving),
        units.label()
    );
    println!("optimal hour stable across grid: {}", if stable { "yes" } else { "no" });
    if cfg.verbosity > 0 || !stable {
        for r in &runs {
            println!("  c = {}: optimal {:02}:00", r.c, r.sweep.optimal_hour);
        }
    }
    if let Some(rep) = interiority {
        if !rep.interior {
            println!(
                "warning: price {:.4} at {:02}:00 exceeds the reservation price",
                rep.max_price, rep.max_hour
            );
        }
    }
    if cfg.verbosity > 0 {
        println!(
            "equal-weight optimal reset hour: {:02}:00, saving {} {}",
            uniform.optimal_hour,
            units.format(uniform.optimal().saving),
            units.label()
        );
    }
    println!("wrote {}", dir.display());
    Ok(())
}
