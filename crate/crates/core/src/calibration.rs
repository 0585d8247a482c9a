//! Inversion of the hourly equilibrium price into price-sensitive shares.
//!
//! With the cheapest hour normalized to a share of one, the transport cost is
//! pinned at `tau = p_min - c` and every other hour follows as
//! `lambda_t = (p_min - c) / (p_t - c)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{LambdaProfile, ModelParams};
use crate::HOURS;

/// Pooled price per clock hour with optional coverage metadata
/// (average observed station count in that hour).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceProfile {
    pub prices: [f64; HOURS],
    pub coverage: Option<[f64; HOURS]>,
}

impl PriceProfile {
    pub fn new(prices: [f64; HOURS]) -> Result<Self> {
        for (hour, &p) in prices.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::Input(format!("non-finite price at hour {hour:02}:00")));
            }
            if p <= 0.0 {
                return Err(Error::Input(format!("non-positive price {p} at hour {hour:02}:00")));
            }
        }
        Ok(Self { prices, coverage: None })
    }

    pub fn with_coverage(mut self, coverage: [f64; HOURS]) -> Self {
        self.coverage = Some(coverage);
        self
    }

    /// Earliest clock hour attaining the minimum price.
    pub fn min_hour(&self) -> usize {
        let mut best = 0;
        for (h, &p) in self.prices.iter().enumerate() {
            if p < self.prices[best] {
                best = h;
            }
        }
        best
    }

    pub fn max_hour(&self) -> usize {
        let mut best = 0;
        for (h, &p) in self.prices.iter().enumerate() {
            if p > self.prices[best] {
                best = h;
            }
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub params: ModelParams,
    pub lambdas: LambdaProfile,
    pub min_hour: usize,
}

pub fn infer_lambda(profile: &PriceProfile, c: f64) -> Result<CalibrationResult> {
    for (hour, &p) in profile.prices.iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::Input(format!("non-finite price at hour {hour:02}:00")));
        }
    }
    if !c.is_finite() {
        return Err(Error::Input(format!("non-finite marginal cost {c}")));
    }
    let min_hour = profile.min_hour();
    let p_min = profile.prices[min_hour];
    if c >= p_min || c <= 0.0 {
        return Err(Error::Calibration { hour: min_hour, price: p_min, c });
    }
    let tau = p_min - c;
    let lambdas = profile.prices.map(|p| tau / (p - c));
    Ok(CalibrationResult {
        params: ModelParams::new(c, tau)?,
        lambdas: LambdaProfile::new(lambdas)?,
        min_hour,
    })
}

/// One calibration per marginal cost, in input order; failures stay per element.
pub fn sensitivity_grid(profile: &PriceProfile, c_values: &[f64]) -> Vec<Result<CalibrationResult>> {
    c_values.iter().map(|&c| infer_lambda(profile, c)).collect()
}

/// Per-hour `(min, max)` share across successful calibrations.
pub fn lambda_band(results: &[CalibrationResult]) -> Option<[(f64, f64); HOURS]> {
    let first = results.first()?;
    let mut band = first.lambdas.values().map(|l| (l, l));
    for r in &results[1..] {
        for (slot, &l) in band.iter_mut().zip(r.lambdas.values()) {
            slot.0 = slot.0.min(l);
            slot.1 = slot.1.max(l);
        }
    }
    Some(band)
}
