use serde::{Deserialize, Serialize};

use super::equilibrium::EquilibriumPath;
use super::params::{check_share, LambdaProfile, ModelParams, WeightProfile};
use crate::error::{Error, Result};
use crate::HOURS;

/// Symmetric equilibrium price of a single hour priced on its own: `c + tau / lambda`.
pub fn unrestricted_price(params: &ModelParams, lambda: f64) -> Result<f64> {
    check_share(lambda)?;
    Ok(params.c + params.tau / lambda)
}

/// Unrestricted prices for all 24 clock hours.
pub fn unrestricted_path(params: &ModelParams, lambdas: &LambdaProfile) -> [f64; HOURS] {
    lambdas.values().map(|l| params.c + params.tau / l)
}

/// Traffic-weighted mean share of a set of hours.
pub fn weighted_mean_share(lambdas: &[f64], weights: &[f64]) -> Result<f64> {
    if lambdas.is_empty() {
        return Err(Error::Domain("empty block".into()));
    }
    if lambdas.len() != weights.len() {
        return Err(Error::Domain(format!(
            "block has {} shares but {} weights",
            lambdas.len(),
            weights.len()
        )));
    }
    let mut weight = 0.0;
    let mut weighted = 0.0;
    for (&l, &w) in lambdas.iter().zip(weights) {
        check_share(l)?;
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::Domain(format!("block weight must be positive, got {w}")));
        }
        weight += w;
        weighted += w * l;
    }
    Ok(weighted / weight)
}

/// Common equilibrium price of a block of hours that must share one price.
pub fn block_price(params: &ModelParams, lambdas: &[f64], weights: &[f64]) -> Result<f64> {
    let lambda_bar = weighted_mean_share(lambdas, weights)?;
    Ok(params.c + params.tau / lambda_bar)
}

/// `sum_t w_t p_t`, paired by clock hour and summed in clock order.
pub fn weighted_average_price(prices_clock: &[f64; HOURS], weights: &WeightProfile) -> f64 {
    prices_clock
        .iter()
        .zip(weights.values())
        .map(|(p, w)| p * w)
        .sum()
}

/// Day-wide weighted mean share `sum_t w_t lambda_t`.
pub fn day_weighted_share(lambdas: &LambdaProfile, weights: &WeightProfile) -> f64 {
    lambdas
        .values()
        .iter()
        .zip(weights.values())
        .map(|(l, w)| l * w)
        .sum()
}

/// Lowest weighted average price any reset-hour can induce; attained by a flat path.
pub fn flat_lower_bound(params: &ModelParams, lambdas: &LambdaProfile, weights: &WeightProfile) -> f64 {
    params.c + params.tau / day_weighted_share(lambdas, weights)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteriorityReport {
    pub cap: Option<f64>,
    pub max_price: f64,
    pub max_hour: usize,
    pub interior: bool,
}

/// Reports whether every price of `path` stays at or below the reservation price.
/// Prices are never altered; an absent cap is trivially interior.
pub fn check_interiority(path: &EquilibriumPath, params: &ModelParams) -> InteriorityReport {
    let mut max_hour = 0;
    for (h, &p) in path.prices_clock.iter().enumerate() {
        if p > path.prices_clock[max_hour] {
            max_hour = h;
        }
    }
    let max_price = path.prices_clock[max_hour];
    InteriorityReport {
        cap: params.v,
        max_price,
        max_hour,
        interior: params.v.is_none_or(|v| max_price <= v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::equilibrium::solve_constrained_path;

    fn params() -> ModelParams {
        ModelParams::new(1.50, 0.281).unwrap()
    }

    #[test]
    fn unrestricted_examples() {
        assert!((unrestricted_price(&params(), 1.0).unwrap() - 1.781).abs() < 1e-12);
        assert!((unrestricted_price(&params(), 0.742).unwrap() - 1.8787).abs() < 0.002);
        let p = ModelParams::new(0.37, 2.9).unwrap();
        assert_eq!(unrestricted_price(&p, 1.0).unwrap(), 0.37 + 2.9);
    }

    #[test]
    fn unrestricted_rejects_bad_share() {
        assert!(matches!(unrestricted_price(&params(), 0.0), Err(Error::Domain(_))));
        assert!(matches!(unrestricted_price(&params(), -0.3), Err(Error::Domain(_))));
        assert!(matches!(unrestricted_price(&params(), 1.01), Err(Error::Domain(_))));
    }

    #[test]
    fn block_price_examples() {
        let p = block_price(&params(), &[0.8, 1.0], &[0.5, 0.5]).unwrap();
        assert!((p - (1.50 + 0.281 / 0.9)).abs() < 1e-15);
        assert!((p - 1.812_222_222_222_222).abs() < 1e-12);
        let single = block_price(&params(), &[0.63], &[17.0]).unwrap();
        assert_eq!(single, unrestricted_price(&params(), 0.63).unwrap());
    }

    #[test]
    fn block_price_errors() {
        assert!(block_price(&params(), &[], &[]).is_err());
        assert!(block_price(&params(), &[0.5, 0.6], &[1.0]).is_err());
        assert!(block_price(&params(), &[0.5], &[0.0]).is_err());
    }

    #[test]
    fn weighted_average_of_flat_path_is_the_price() {
        let mut raw = [0.0; HOURS];
        for (h, r) in raw.iter_mut().enumerate() {
            *r = 1.0 + (h * h % 7) as f64;
        }
        let w = WeightProfile::from_raw(raw).unwrap();
        let avg = weighted_average_price(&[1.9; HOURS], &w);
        assert!((avg - 1.9).abs() < 1e-14);
    }

    #[test]
    fn flat_bound_examples() {
        let ones = LambdaProfile::constant(1.0).unwrap();
        let b = flat_lower_bound(&params(), &ones, &WeightProfile::uniform());
        assert!((b - 1.781).abs() < 1e-14);

        // two equal-weight hours at 0.5 and 1.0 -> arithmetic mean 0.75
        let mut l = [0.5; HOURS];
        for v in l.iter_mut().skip(12) {
            *v = 1.0;
        }
        let b = flat_lower_bound(&params(), &LambdaProfile::new(l).unwrap(), &WeightProfile::uniform());
        assert!((b - (1.5 + 0.281 / 0.75)).abs() < 1e-14);
    }

    #[test]
    fn interiority() {
        let mut l = [1.0; HOURS];
        l[7] = 0.742;
        let lambdas = LambdaProfile::new(l).unwrap();
        // reset at 07:00 leaves every hour unpooled
        let path = solve_constrained_path(&params(), &lambdas, &WeightProfile::uniform(), 7).unwrap();
        let open = check_interiority(&path, &params());
        assert!(open.interior);
        assert_eq!(open.max_hour, 7);

        let loose = ModelParams::with_reservation(1.5, 0.281, Some(2.0)).unwrap();
        assert!(check_interiority(&path, &loose).interior);

        let tight = ModelParams::with_reservation(1.5, 0.281, Some(1.80)).unwrap();
        let r = check_interiority(&path, &tight);
        assert!(!r.interior);
        assert!((r.max_price - 1.8787).abs() < 0.002);
        // the diagnostic never clamps
        assert!(path.prices_clock[7] > 1.80);
    }
}
