//! Independent checks of the constrained equilibrium.
//!
//! Profits are evaluated from the demand expression directly and the
//! constrained path is recovered by enumerating every consecutive partition
//! of a short cycle; only the `compare_*` helpers touch the pooling solver.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Block, ModelParams};
use crate::sweep::SweepResult;

/// Largest cycle the exhaustive solver accepts (2^11 partitions).
pub const BRUTE_FORCE_LIMIT: usize = 12;

/// Station i's payoff problem against a fixed rival path, in within-cycle order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfitSpec {
    pub params: ModelParams,
    pub lambdas: Vec<f64>,
    pub weights: Vec<f64>,
    pub rival_path: Vec<f64>,
}

impl ProfitSpec {
    pub fn new(params: ModelParams, lambdas: Vec<f64>, weights: Vec<f64>, rival_path: Vec<f64>) -> Result<Self> {
        let n = lambdas.len();
        if n == 0 || weights.len() != n || rival_path.len() != n {
            return Err(Error::Domain(format!(
                "profit spec needs equal non-empty lengths, got {}/{}/{}",
                n,
                weights.len(),
                rival_path.len()
            )));
        }
        Ok(Self {
            params,
            lambdas,
            weights,
            rival_path,
        })
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    fn check_len(&self, own: &[f64]) -> Result<()> {
        if own.len() != self.len() {
            return Err(Error::Domain(format!(
                "own path has {} hours, spec has {}",
                own.len(),
                self.len()
            )));
        }
        Ok(())
    }
}

/// `sum_k w_k (p_ik - c) (1/2 + lambda_k (p_jk - p_ik) / (2 tau))`.
pub fn profit(own: &[f64], spec: &ProfitSpec) -> Result<f64> {
    spec.check_len(own)?;
    let ModelParams { c, tau, .. } = spec.params;
    Ok((0..spec.len())
        .map(|k| {
            let demand = 0.5 + spec.lambdas[k] * (spec.rival_path[k] - own[k]) / (2.0 * tau);
            spec.weights[k] * (own[k] - c) * demand
        })
        .sum())
}

/// Analytic partial derivatives of [`profit`] with respect to each own price.
pub fn profit_gradient(own: &[f64], spec: &ProfitSpec) -> Result<Vec<f64>> {
    spec.check_len(own)?;
    let ModelParams { c, tau, .. } = spec.params;
    Ok((0..spec.len())
        .map(|k| {
            let l = spec.lambdas[k];
            spec.weights[k] * (0.5 + l * (spec.rival_path[k] - own[k]) / (2.0 * tau) - l * (own[k] - c) / (2.0 * tau))
        })
        .collect())
}

/// Maximal runs of equal price as inclusive `(start, end)` pairs.
pub fn constant_runs(prices: &[f64]) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start = 0;
    for k in 1..=prices.len() {
        if k == prices.len() || prices[k] != prices[start] {
            if k > start {
                runs.push((start, k - 1));
            }
            start = k;
        }
    }
    runs
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockResidual {
    pub start: usize,
    pub end: usize,
    pub price: f64,
    pub residual: f64,
}

/// Symmetric first-order condition per block:
/// `1/2 sum w - (p - c) / (2 tau) sum w lambda`.
///
/// Blocks are the maximal constant-price runs of `prices`; `spec.rival_path`
/// is ignored because symmetry is imposed.
pub fn foc_residual(prices: &[f64], spec: &ProfitSpec) -> Result<Vec<BlockResidual>> {
    spec.check_len(prices)?;
    Ok(foc_residual_on(prices, spec, &constant_runs(prices)))
}

/// As [`foc_residual`] on an explicit partition.
pub fn foc_residual_on(prices: &[f64], spec: &ProfitSpec, runs: &[(usize, usize)]) -> Vec<BlockResidual> {
    let ModelParams { c, tau, .. } = spec.params;
    runs.iter()
        .map(|&(start, end)| {
            let w: f64 = spec.weights[start..=end].iter().sum();
            let wl: f64 = (start..=end).map(|k| spec.weights[k] * spec.lambdas[k]).sum();
            let price = prices[start];
            BlockResidual {
                start,
                end,
                price,
                residual: 0.5 * w - (price - c) / (2.0 * tau) * wl,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BruteForceSolution {
    pub prices: Vec<f64>,
    pub partition: Vec<(usize, usize)>,
    pub loss: f64,
}

/// Weighted quadratic distance to the unrestricted path,
/// `sum_k (w_k lambda_k / (2 tau)) (p_k - p_k^F)^2`.
pub fn quadratic_loss(prices: &[f64], lambdas: &[f64], weights: &[f64], params: &ModelParams) -> f64 {
    (0..prices.len())
        .map(|k| {
            let flex = params.c + params.tau / lambdas[k];
            let a = weights[k] * lambdas[k] / (2.0 * params.tau);
            a * (prices[k] - flex).powi(2)
        })
        .sum()
}

/// Constrained path by exhaustive search over consecutive partitions.
///
/// Every block is fitted with the `w * lambda`-weighted mean of unrestricted
/// prices; among weakly decreasing candidates the smallest quadratic loss wins.
pub fn brute_force_constrained(lambdas: &[f64], weights: &[f64], params: &ModelParams) -> Result<BruteForceSolution> {
    let n = lambdas.len();
    if n == 0 || weights.len() != n {
        return Err(Error::Domain(format!("need equal non-empty lengths, got {n}/{}", weights.len())));
    }
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { n, limit: BRUTE_FORCE_LIMIT });
    }
    let flex: Vec<f64> = lambdas.iter().map(|l| params.c + params.tau / l).collect();
    let a: Vec<f64> = lambdas
        .iter()
        .zip(weights)
        .map(|(l, w)| w * l / (2.0 * params.tau))
        .collect();

    let mut best: Option<BruteForceSolution> = None;
    // bit j set: a cut between positions j and j + 1
    for mask in 0u32..(1u32 << (n - 1)) {
        let mut blocks = Vec::new();
        let mut start = 0;
        for j in 0..n {
            if j == n - 1 || mask & (1 << j) != 0 {
                blocks.push((start, j));
                start = j + 1;
            }
        }
        let fits: Vec<f64> = blocks
            .iter()
            .map(|&(s, e)| {
                let num: f64 = (s..=e).map(|k| a[k] * flex[k]).sum();
                let den: f64 = a[s..=e].iter().sum();
                num / den
            })
            .collect();
        if fits.windows(2).any(|f| f[1] > f[0]) {
            continue;
        }
        let prices: Vec<f64> = blocks
            .iter()
            .zip(&fits)
            .flat_map(|(&(s, e), &f)| std::iter::repeat_n(f, e - s + 1))
            .collect();
        let loss = quadratic_loss(&prices, lambdas, weights, params);
        if best.as_ref().is_none_or(|b| loss < b.loss) {
            best = Some(BruteForceSolution {
                partition: merge_close(&blocks, &fits),
                prices,
                loss,
            });
        }
    }
    Ok(best.expect("the single-block partition is always feasible"))
}

fn merge_close(blocks: &[(usize, usize)], fits: &[f64]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize, f64)> = Vec::new();
    for (&(s, e), &f) in blocks.iter().zip(fits) {
        match out.last_mut() {
            Some(prev) if (prev.2 - f).abs() <= 1e-12 * f.abs() => prev.1 = e,
            _ => out.push((s, e, f)),
        }
    }
    out.into_iter().map(|(s, e, _)| (s, e)).collect()
}

/// Finite family of monotone deviations around a candidate path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationGrid {
    pub radius: f64,
    pub step: f64,
    /// Extra profit slack on top of the base tolerance of 1e-9.
    pub slack: f64,
}

impl Default for DeviationGrid {
    fn default() -> Self {
        Self {
            radius: 0.05,
            step: 0.005,
            slack: 0.0,
        }
    }
}

impl DeviationGrid {
    pub fn offsets(&self) -> Vec<f64> {
        let steps = (self.radius / self.step).round() as i64;
        (-steps..=steps)
            .filter(|&i| i != 0)
            .map(|i| i as f64 * self.step)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub candidate_profit: f64,
    pub best_profit: f64,
    /// Hour and price offset of the best deviation, if any beats the tolerance.
    pub best_deviation: Option<(usize, f64)>,
    pub best_path: Vec<f64>,
    pub deviations_tried: usize,
}

impl DeviationReport {
    pub fn is_equilibrium(&self) -> bool {
        self.best_deviation.is_none()
    }
}

/// Moves one hour by `delta` and clips the rest of the path back into the
/// weakly decreasing cone.
pub fn monotone_deviation(path: &[f64], hour: usize, delta: f64) -> Vec<f64> {
    let mut dev = path.to_vec();
    let target = path[hour] + delta;
    dev[hour] = target;
    for p in &mut dev[..hour] {
        *p = p.max(target);
    }
    for p in &mut dev[hour + 1..] {
        *p = p.min(target);
    }
    dev
}

/// Searches single-hour monotone deviations for a profitable one.
///
/// `spec.rival_path` is the rival's path; `path` is station i's candidate
/// (for a symmetric check, the same path).
pub fn deviation_check(path: &[f64], spec: &ProfitSpec, grid: &DeviationGrid) -> Result<DeviationReport> {
    let candidate_profit = profit(path, spec)?;
    let tol = 1e-9 + grid.slack;
    let mut best_profit = candidate_profit;
    let mut best_deviation = None;
    let mut best_path = path.to_vec();
    let mut tried = 0;
    for hour in 0..path.len() {
        for delta in grid.offsets() {
            let dev = monotone_deviation(path, hour, delta);
            tried += 1;
            let value = profit(&dev, spec)?;
            if value > best_profit && value > candidate_profit + tol {
                best_profit = value;
                best_deviation = Some((hour, delta));
                best_path = dev;
            }
        }
    }
    Ok(DeviationReport {
        candidate_profit,
        best_profit,
        best_deviation,
        best_path,
        deviations_tried: tried,
    })
}

/// Random cycle: shares uniform in `(share_floor, 1]`, weights positive and
/// normalized to unit sum.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize, share_floor: f64) -> (Vec<f64>, Vec<f64>) {
    let lambdas: Vec<f64> = (0..n)
        .map(|_| 1.0 - rng.gen::<f64>() * (1.0 - share_floor))
        .collect();
    let raw: Vec<f64> = (0..n).map(|_| 0.01 + rng.gen::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    (lambdas, raw.into_iter().map(|w| w / total).collect())
}

fn bounds(blocks: &[Block]) -> Vec<(usize, usize)> {
    blocks.iter().map(|b| (b.start_k, b.end_k)).collect()
}

fn expand(blocks: &[Block]) -> Vec<f64> {
    crate::model::block_prices(blocks)
}

/// Compares the pooling solver with exhaustive search; `None` when they agree.
pub fn compare_with_brute_force(
    params: &ModelParams,
    lambdas: &[f64],
    weights: &[f64],
    tol: f64,
) -> Result<Option<String>> {
    let pooled = crate::model::solve_within_cycle(params, lambdas, weights)?;
    let brute = brute_force_constrained(lambdas, weights, params)?;
    Ok(describe_mismatch(&bounds(&pooled), &expand(&pooled), &brute.partition, &brute.prices, tol))
}

/// Compares the share-space and price-space pooling routes; `None` when they agree.
pub fn compare_dual_space(
    params: &ModelParams,
    lambdas: &[f64],
    weights: &[f64],
    tol: f64,
) -> Result<Option<String>> {
    let shares = crate::model::solve_within_cycle(params, lambdas, weights)?;
    let prices = crate::model::solve_within_cycle_price_space(params, lambdas, weights)?;
    Ok(describe_mismatch(&bounds(&shares), &expand(&shares), &bounds(&prices), &expand(&prices), tol))
}

fn describe_mismatch(
    part_a: &[(usize, usize)],
    prices_a: &[f64],
    part_b: &[(usize, usize)],
    prices_b: &[f64],
    tol: f64,
) -> Option<String> {
    if part_a != part_b {
        return Some(format!("partitions differ: {part_a:?} vs {part_b:?}"));
    }
    let worst = prices_a
        .iter()
        .zip(prices_b)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    (worst > tol).then(|| format!("prices differ by {worst:e}"))
}

/// Flat-path bound violations across a sweep, one message each.
///
/// Checks `bound <= avg(r)`, equality exactly when the path is flat (within
/// `tol`), and that any flat-inducing hour attains the global minimum.
pub fn check_flat_bound(sweep: &SweepResult, tol: f64) -> Vec<String> {
    let mut problems = Vec::new();
    let min_avg = sweep
        .evaluations
        .iter()
        .map(|e| e.weighted_avg)
        .fold(f64::INFINITY, f64::min);
    for e in &sweep.evaluations {
        let gap = e.weighted_avg - sweep.bound;
        if gap < -tol {
            problems.push(format!("hour {}: average below bound by {:e}", e.reset_hour, -gap));
        }
        let flat = e.block_count == 1;
        if flat && gap.abs() > tol {
            problems.push(format!("hour {}: flat path misses bound by {gap:e}", e.reset_hour));
        }
        if !flat && gap <= tol {
            problems.push(format!(
                "hour {}: {} blocks but average equals bound",
                e.reset_hour, e.block_count
            ));
        }
        if flat && e.weighted_avg > min_avg + tol {
            problems.push(format!("hour {}: flat path is not the global minimum", e.reset_hour));
        }
        if e.saving < -tol {
            problems.push(format!("hour {}: negative saving {:e}", e.reset_hour, e.saving));
        }
    }
    problems
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::weekday_sample;
    use crate::hours::rotate;
    use crate::model::{block_price, solve_constrained_path};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params() -> ModelParams {
        ModelParams::new(1.5, 0.3).unwrap()
    }

    fn spec1(rival: f64) -> ProfitSpec {
        ProfitSpec::new(params(), vec![0.8], vec![1.0], vec![rival]).unwrap()
    }

    #[test]
    fn symmetric_single_hour_splits_market() {
        let p = 1.9;
        assert!((profit(&[p], &spec1(p)).unwrap() - (p - 1.5) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn zero_margin_zero_profit() {
        for rival in [1.2, 1.8, 2.4] {
            assert_eq!(profit(&[1.5], &spec1(rival)).unwrap(), 0.0);
        }
    }

    #[test]
    fn unrestricted_profit_per_hour() {
        let fx = weekday_sample();
        let flex: Vec<f64> = fx.lambdas.values().iter().map(|l| fx.params.c + fx.params.tau / l).collect();
        for h in 0..24 {
            let spec = ProfitSpec::new(
                fx.params,
                vec![fx.lambdas.get(h)],
                vec![fx.weights.get(h)],
                vec![flex[h]],
            )
            .unwrap();
            let expected = fx.weights.get(h) * fx.params.tau / (2.0 * fx.lambdas.get(h));
            assert!((profit(&[flex[h]], &spec).unwrap() - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn length_mismatch() {
        assert!(profit(&[1.0, 2.0], &spec1(1.9)).is_err());
        assert!(ProfitSpec::new(params(), vec![0.5], vec![], vec![1.0]).is_err());
    }

    #[test]
    fn two_hour_brute_force() {
        // shares chosen so unrestricted prices are (1.8, 1.9) and (1.9, 1.8);
        // weights chosen so the fit weights w * lambda are equal
        let p = ModelParams::new(1.5, 0.3).unwrap();
        let l_low_price = 1.0; // 1.5 + 0.3 / 1.0 = 1.8
        let l_high_price = 0.75; // 1.5 + 0.3 / 0.75 = 1.9
        let sol = brute_force_constrained(&[l_low_price, l_high_price], &[0.75, 1.0], &p).unwrap();
        assert_eq!(sol.partition, vec![(0, 1)]);
        assert!((sol.prices[0] - 1.85).abs() < 1e-12);
        assert_eq!(sol.prices[0], sol.prices[1]);

        let sol = brute_force_constrained(&[l_high_price, l_low_price], &[1.0, 1.0], &p).unwrap();
        assert_eq!(sol.partition, vec![(0, 0), (1, 1)]);
        assert!((sol.prices[0] - 1.9).abs() < 1e-12);
        assert!((sol.prices[1] - 1.8).abs() < 1e-12);
    }

    #[test]
    fn brute_force_refuses_large_n() {
        let n = BRUTE_FORCE_LIMIT + 1;
        assert!(matches!(
            brute_force_constrained(&vec![0.9; n], &vec![1.0; n], &params()),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn brute_force_matches_pooling_on_random_eights() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let (l, w) = random_instance(&mut rng, 8, 0.2);
            assert_eq!(compare_with_brute_force(&params(), &l, &w, 1e-10).unwrap(), None);
        }
    }

    #[test]
    fn single_hour_has_no_profitable_deviation() {
        let p = params();
        let flex = p.c + p.tau / 0.8;
        let report = deviation_check(&[flex], &spec1(flex), &DeviationGrid::default()).unwrap();
        assert!(report.is_equilibrium());
        assert_eq!(report.deviations_tried, 20);
    }

    fn within_cycle_spec(r: usize) -> (Vec<f64>, ProfitSpec) {
        let fx = weekday_sample();
        let path = solve_constrained_path(&fx.params, &fx.lambdas, &fx.weights, r).unwrap();
        let within = path.prices_within_cycle().to_vec();
        let spec = ProfitSpec::new(
            fx.params,
            rotate(fx.lambdas.values(), r).to_vec(),
            rotate(fx.weights.values(), r).to_vec(),
            within.clone(),
        )
        .unwrap();
        (within, spec)
    }

    #[test]
    fn flat_eleven_path_survives_deviations() {
        let (path, spec) = within_cycle_spec(11);
        let report = deviation_check(&path, &spec, &DeviationGrid::default()).unwrap();
        assert!(report.is_equilibrium(), "{report:?}");
    }

    #[test]
    fn perturbed_path_has_profitable_deviation() {
        let (mut path, _) = within_cycle_spec(11);
        path[0] += 0.01;
        let (_, base) = within_cycle_spec(11);
        let spec = ProfitSpec { rival_path: path.clone(), ..base };
        let report = deviation_check(&path, &spec, &DeviationGrid::default()).unwrap();
        let (hour, delta) = report.best_deviation.expect("deviation exists");
        assert_eq!(hour, 0);
        assert!(delta < 0.0);
        assert!(report.best_profit > report.candidate_profit);
    }

    #[test]
    fn foc_zero_on_priced_block() {
        let p = params();
        let l = vec![0.6, 0.9, 0.75];
        let w = vec![0.2, 0.5, 0.3];
        let price = block_price(&p, &l, &w).unwrap();
        let spec = ProfitSpec::new(p, l, w, vec![price; 3]).unwrap();
        let res = foc_residual(&[price; 3], &spec).unwrap();
        assert_eq!(res.len(), 1);
        assert!(res[0].residual.abs() < 1e-12);

        let res = foc_residual(&[price + 0.01; 3], &spec).unwrap();
        assert!(res[0].residual < 0.0);
    }

    #[test]
    fn foc_zero_on_unrestricted_path() {
        let fx = weekday_sample();
        let flex: Vec<f64> = fx.lambdas.values().iter().map(|l| fx.params.c + fx.params.tau / l).collect();
        let spec = ProfitSpec::new(
            fx.params,
            fx.lambdas.values().to_vec(),
            fx.weights.values().to_vec(),
            flex.clone(),
        )
        .unwrap();
        let runs: Vec<(usize, usize)> = (0..24).map(|k| (k, k)).collect();
        let res = foc_residual_on(&flex, &spec, &runs);
        assert_eq!(res.len(), 24);
        assert!(res.iter().all(|r| r.residual.abs() < 1e-12));
    }

    #[test]
    fn constant_runs_split() {
        assert_eq!(constant_runs(&[2.0, 2.0, 1.0, 1.0, 0.5]), vec![(0, 1), (2, 3), (4, 4)]);
        assert_eq!(constant_runs(&[]), Vec::<(usize, usize)>::new());
    }

    #[test]
    fn monotone_projection() {
        let dev = monotone_deviation(&[3.0, 2.0, 2.0, 1.0], 2, 0.5);
        assert_eq!(dev, vec![3.0, 2.5, 2.5, 1.0]);
        let dev = monotone_deviation(&[3.0, 2.0, 2.0, 1.0], 1, -1.5);
        assert_eq!(dev, vec![3.0, 0.5, 0.5, 0.5]);
    }
}
