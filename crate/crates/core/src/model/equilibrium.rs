//! Constrained symmetric equilibrium under a single daily upward reset.
//!
//! Between two resets the price path must be weakly decreasing. The unique
//! symmetric equilibrium pools adjacent hours until the traffic-weighted block
//! means of the price-sensitive share are strictly increasing in within-cycle
//! time, then prices every block at `c + tau / lambda_bar`.

use serde::{Deserialize, Serialize};

use super::isotonic::{pool_adjacent_violators, Direction, Pool};
use super::params::{check_share, LambdaProfile, ModelParams, WeightProfile};
use crate::error::{Error, Result};
use crate::hours::{clock_hour, rotate};
use crate::HOURS;

/// Equal-share neighbours (within this absolute slack) are pooled.
pub const SHARE_TIE_TOL: f64 = 1e-12;

/// Consecutive within-cycle hours sharing one equilibrium price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub start_k: usize,
    /// Inclusive.
    pub end_k: usize,
    pub weight_sum: f64,
    pub lambda_bar: f64,
    pub price: f64,
}

impl Block {
    pub fn len(&self) -> usize {
        self.end_k - self.start_k + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, k: usize) -> bool {
        (self.start_k..=self.end_k).contains(&k)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockPartition {
    pub reset_hour: usize,
    pub blocks: Vec<Block>,
}

impl BlockPartition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block boundaries as inclusive `(start_k, end_k)` pairs.
    pub fn bounds(&self) -> Vec<(usize, usize)> {
        self.blocks.iter().map(|b| (b.start_k, b.end_k)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPath {
    pub reset_hour: usize,
    pub prices_clock: [f64; HOURS],
    pub partition: BlockPartition,
}

impl EquilibriumPath {
    pub fn block_count(&self) -> usize {
        self.partition.len()
    }

    /// Prices in within-cycle order, `k = 0` at the reset hour.
    pub fn prices_within_cycle(&self) -> [f64; HOURS] {
        rotate(&self.prices_clock, self.reset_hour)
    }

    pub fn is_flat(&self) -> bool {
        self.block_count() == 1
    }
}

fn validate_sequence(lambdas: &[f64], weights: &[f64]) -> Result<()> {
    if lambdas.is_empty() {
        return Err(Error::Domain("empty sequence".into()));
    }
    if lambdas.len() != weights.len() {
        return Err(Error::Domain(format!(
            "{} shares but {} weights",
            lambdas.len(),
            weights.len()
        )));
    }
    for &l in lambdas {
        check_share(l)?;
    }
    for &w in weights {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::Domain(format!("weight must be positive, got {w}")));
        }
    }
    Ok(())
}

fn block_from_pool(params: &ModelParams, lambdas: &[f64], weights: &[f64], pool: &Pool) -> Block {
    let range = pool.start..=pool.end;
    let weight_sum: f64 = weights[range.clone()].iter().sum();
    let share_sum: f64 = lambdas[range.clone()]
        .iter()
        .zip(&weights[range])
        .map(|(l, w)| l * w)
        .sum();
    let lambda_bar = if pool.start == pool.end {
        lambdas[pool.start]
    } else {
        share_sum / weight_sum
    };
    Block {
        start_k: pool.start,
        end_k: pool.end,
        weight_sum,
        lambda_bar,
        price: params.c + params.tau / lambda_bar,
    }
}

/// Merges neighbouring blocks whose prices came out identical.
fn merge_equal_prices(params: &ModelParams, blocks: Vec<Block>) -> Vec<Block> {
    let mut out: Vec<Block> = Vec::with_capacity(blocks.len());
    for b in blocks {
        match out.last_mut() {
            Some(prev) if prev.price == b.price => {
                let share_sum = prev.lambda_bar * prev.weight_sum + b.lambda_bar * b.weight_sum;
                prev.end_k = b.end_k;
                prev.weight_sum += b.weight_sum;
                prev.lambda_bar = share_sum / prev.weight_sum;
                prev.price = params.c + params.tau / prev.lambda_bar;
            }
            _ => out.push(b),
        }
    }
    out
}

/// Equilibrium blocks for shares and weights already in within-cycle order.
///
/// Works for any sequence length, so short cycles can be checked against
/// exhaustive enumeration. Pools in share space: block means of `lambda`
/// weighted by `w` must be strictly increasing.
pub fn solve_within_cycle(params: &ModelParams, lambdas: &[f64], weights: &[f64]) -> Result<Vec<Block>> {
    validate_sequence(lambdas, weights)?;
    let pools = pool_adjacent_violators(lambdas, weights, Direction::Increasing, SHARE_TIE_TOL);
    let blocks = pools
        .iter()
        .map(|p| block_from_pool(params, lambdas, weights, p))
        .collect();
    Ok(merge_equal_prices(params, blocks))
}

/// The same equilibrium computed as a weighted isotonic regression of the
/// unrestricted prices, weights `w * lambda / (2 tau)`, weakly decreasing.
pub fn solve_within_cycle_price_space(
    params: &ModelParams,
    lambdas: &[f64],
    weights: &[f64],
) -> Result<Vec<Block>> {
    validate_sequence(lambdas, weights)?;
    let flexible: Vec<f64> = lambdas.iter().map(|l| params.c + params.tau / l).collect();
    let fit_weights: Vec<f64> = lambdas
        .iter()
        .zip(weights)
        .map(|(l, w)| w * l / (2.0 * params.tau))
        .collect();
    let pools = pool_adjacent_violators(&flexible, &fit_weights, Direction::Decreasing, SHARE_TIE_TOL);
    Ok(pools
        .iter()
        .map(|pool| {
            let range = pool.start..=pool.end;
            let weight_sum: f64 = weights[range.clone()].iter().sum();
            let share_sum: f64 = lambdas[range.clone()]
                .iter()
                .zip(&weights[range])
                .map(|(l, w)| l * w)
                .sum();
            Block {
                start_k: pool.start,
                end_k: pool.end,
                weight_sum,
                lambda_bar: share_sum / weight_sum,
                price: pool.mean(),
            }
        })
        .collect())
}

/// Expands blocks to one price per within-cycle position.
pub fn block_prices(blocks: &[Block]) -> Vec<f64> {
    blocks
        .iter()
        .flat_map(|b| std::iter::repeat_n(b.price, b.len()))
        .collect()
}

/// Constrained symmetric equilibrium path for a daily reset at `reset_hour`.
pub fn solve_constrained_path(
    params: &ModelParams,
    lambdas: &LambdaProfile,
    weights: &WeightProfile,
    reset_hour: usize,
) -> Result<EquilibriumPath> {
    if reset_hour >= HOURS {
        return Err(Error::Domain(format!("reset hour must be in 0..24, got {reset_hour}")));
    }
    let lam_k = rotate(lambdas.values(), reset_hour);
    let w_k = rotate(weights.values(), reset_hour);
    let blocks = solve_within_cycle(params, &lam_k, &w_k)?;

    let mut prices_clock = [0.0; HOURS];
    for b in &blocks {
        for k in b.start_k..=b.end_k {
            prices_clock[clock_hour(reset_hour, k)] = b.price;
        }
    }
    Ok(EquilibriumPath {
        reset_hour,
        prices_clock,
        partition: BlockPartition { reset_hour, blocks },
    })
}
