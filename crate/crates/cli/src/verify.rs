use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reset_hour_core::hours::rotate;
use reset_hour_core::model::ModelParams;
use reset_hour_core::oracle::{
    check_flat_bound, compare_dual_space, compare_with_brute_force, constant_runs, deviation_check, foc_residual,
    random_instance, DeviationGrid, ProfitSpec,
};
use reset_hour_core::sweep::sweep_all;
use reset_hour_core::{LambdaProfile, WeightProfile, HOURS};

use crate::config::RunConfig;
use crate::output::{load_prices, load_weights, prepare_dir, require, write_file};
use crate::sweep::run_costs;
use crate::VerificationFailed;

const ORACLE_TOL: f64 = 1e-10;
const FOC_TOL: f64 = 1e-10;
const BOUND_TOL: f64 = 1e-12;
const WINDOW: usize = 8;
const SHARE_FLOOR: f64 = 0.2;

#[derive(Default)]
struct Report {
    lines: Vec<String>,
    failures: usize,
}

impl Report {
    /// Records one named check; `problems` lists failing instances.
    fn check(&mut self, name: &str, instances: usize, problems: Vec<String>) {
        if problems.is_empty() {
            self.lines.push(format!("ok   {name} ({instances} instances)"));
        } else {
            self.failures += 1;
            self.lines
                .push(format!("FAIL {name}: {} of {instances} instances", problems.len()));
            self.lines.extend(problems.into_iter().map(|p| format!("     {p}")));
        }
    }
}

fn within_cycle(lambdas: &LambdaProfile, weights: &WeightProfile, r: usize) -> (Vec<f64>, Vec<f64>) {
    (rotate(lambdas.values(), r).to_vec(), rotate(weights.values(), r).to_vec())
}

fn foc_problems(label: &str, prices: &[f64], spec: &ProfitSpec) -> Result<Vec<String>> {
    let mut out = Vec::new();
    if let Some(k) = (1..prices.len()).find(|&k| prices[k] > prices[k - 1]) {
        out.push(format!("{label}: price rises at within-cycle hour {k}"));
    }
    for b in foc_residual(prices, spec)? {
        if b.residual.abs() > FOC_TOL {
            out.push(format!(
                "{label}: block {}..={} at {} has residual {:e}",
                b.start, b.end, b.price, b.residual
            ));
        }
    }
    Ok(out)
}

/// Reads `reset_hour,clock_hour,price` rows into 24 clock-ordered paths.
fn read_paths(path: &Path) -> Result<Vec<[f64; HOURS]>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let mut paths = vec![[f64::NAN; HOURS]; HOURS];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = |j: usize| rec.get(j).unwrap_or("");
        let (r, h, p): (usize, usize, f64) = match (field(0).parse(), field(1).parse(), field(2).parse()) {
            (Ok(r), Ok(h), Ok(p)) if r < HOURS && h < HOURS => (r, h, p),
            _ => bail!("{} row {}: expected reset_hour,clock_hour,price", path.display(), i + 2),
        };
        paths[r][h] = p;
    }
    for (r, p) in paths.iter().enumerate() {
        if let Some(h) = p.iter().position(|x| x.is_nan()) {
            bail!("{}: reset hour {r} lacks clock hour {h}", path.display());
        }
    }
    Ok(paths)
}

fn paths_file(cfg: &RunConfig) -> Option<PathBuf> {
    cfg.paths.clone().or_else(|| {
        let p = cfg.out_dir.join("paths.csv");
        p.is_file().then_some(p)
    })
}

pub fn run(cfg: &RunConfig) -> Result<()> {
    let profile = load_prices(&require(&cfg.profile, "profile")?)?;
    let weights = load_weights(&require(&cfg.weights, "weights")?)?;
    let stored = match paths_file(cfg) {
        Some(p) => Some((read_paths(&p)?, p)),
        None => None,
    };
    prepare_dir(&cfg.out_dir)?;

    let runs = run_costs(cfg, &profile, &weights)?;
    let base = &runs[0];
    let params = base.calibration.params;
    let lambdas = base.calibration.lambdas;
    let mut report = Report::default();

    for r in &runs {
        let problems = check_flat_bound(&r.sweep, BOUND_TOL)
            .into_iter()
            .map(|p| format!("c = {}: {p}", r.c))
            .collect();
        report.check(&format!("flat bound and savings at c = {}", r.c), HOURS, problems);
    }
    let uniform = sweep_all(&params, &lambdas, &WeightProfile::uniform())?;
    report.check("flat bound and savings, equal weights", HOURS, check_flat_bound(&uniform, BOUND_TOL));

    let mut foc = Vec::new();
    let mut dual = Vec::new();
    let mut brute = Vec::new();
    let mut deviations = Vec::new();
    let mut tried = 0;
    for e in &base.sweep.evaluations {
        let r = e.reset_hour;
        let (lam, w) = within_cycle(&lambdas, &weights, r);
        let prices = e.path.prices_within_cycle().to_vec();
        let spec = ProfitSpec::new(params, lam.clone(), w.clone(), prices.clone())?;
        foc.extend(foc_problems(&format!("reset {r:02}:00"), &prices, &spec)?);
        if let Some(msg) = compare_dual_space(&params, &lam, &w, ORACLE_TOL)? {
            dual.push(format!("reset {r:02}:00: {msg}"));
        }
        for start in (0..HOURS).step_by(WINDOW) {
            let range = start..start + WINDOW;
            if let Some(msg) = compare_with_brute_force(&params, &lam[range.clone()], &w[range], ORACLE_TOL)? {
                brute.push(format!("reset {r:02}:00 window k = {start}..{}: {msg}", start + WINDOW));
            }
        }
        let dev = deviation_check(&prices, &spec, &DeviationGrid::default())?;
        tried += dev.deviations_tried;
        if let Some((k, delta)) = dev.best_deviation {
            deviations.push(format!(
                "reset {r:02}:00: moving hour k = {k} by {delta} gains {:e}",
                dev.best_profit - dev.candidate_profit
            ));
        }
    }
    report.check("first-order conditions on solved paths", HOURS, foc);
    report.check("share space vs price space pooling", HOURS, dual);
    report.check("pooling vs exhaustive search on 8-hour windows", HOURS * HOURS / WINDOW, brute);
    report.check(&format!("single-hour deviations ({tried} tried)"), HOURS, deviations);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut random = Vec::new();
    for i in 0..cfg.random_instances {
        let n = rng.gen_range(1..=WINDOW);
        let (lam, w) = random_instance(&mut rng, n, SHARE_FLOOR);
        let p = ModelParams::new(rng.gen_range(0.5..2.0), rng.gen_range(0.05..0.6))?;
        if let Some(msg) = compare_with_brute_force(&p, &lam, &w, ORACLE_TOL)? {
            random.push(format!(
                "instance {i} (seed {}): c = {}, tau = {}, lambda = {lam:?}, w = {w:?}: {msg}",
                cfg.seed, p.c, p.tau
            ));
        }
    }
    report.check(
        &format!("pooling vs exhaustive search, random seed {}", cfg.seed),
        cfg.random_instances,
        random,
    );

    if let Some((paths, file)) = &stored {
        let mut problems = Vec::new();
        for (r, clock) in paths.iter().enumerate() {
            let (lam, w) = within_cycle(&lambdas, &weights, r);
            let prices = rotate(clock, r).to_vec();
            let spec = ProfitSpec::new(params, lam, w, prices.clone())?;
            problems.extend(foc_problems(&format!("reset {r:02}:00"), &prices, &spec)?);
            if cfg.verbosity > 1 {
                println!("reset {r:02}:00: {} blocks in stored path", constant_runs(&prices).len());
            }
        }
        let name = file.file_name().map_or_else(|| file.display().to_string(), |n| n.to_string_lossy().into_owned());
        report.check(&format!("first-order conditions on stored {name}"), HOURS, problems);
    }

    write_file(&cfg.out_dir, "verify_report.txt", |out| {
        for line in &report.lines {
            writeln!(out, "{line}")?;
        }
        Ok(())
    })?;
    for line in &report.lines {
        if cfg.verbosity > 0 || !line.starts_with("ok") {
            println!("{line}");
        }
    }
    if report.failures > 0 {
        return Err(VerificationFailed(report.failures).into());
    }
    println!("all {} checks passed", report.lines.len());
    Ok(())
}
