use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::HOURS;

/// Absolute tolerance on the unit sum of a [`WeightProfile`].
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Calibrated primitives of the two-station Hotelling model.
///
/// `c` is the constant marginal cost and `tau` the transport cost, both in
/// currency per liter. `v` is the reservation price of price-insensitive
/// consumers; it only feeds the interiority diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub c: f64,
    pub tau: f64,
    pub v: Option<f64>,
}

impl ModelParams {
    pub fn new(c: f64, tau: f64) -> Result<Self> {
        Self::with_reservation(c, tau, None)
    }

    pub fn with_reservation(c: f64, tau: f64, v: Option<f64>) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Domain(format!("marginal cost must be positive, got {c}")));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::Domain(format!("transport cost must be positive, got {tau}")));
        }
        if let Some(v) = v {
            if v.is_nan() || v <= c {
                return Err(Error::Domain(format!(
                    "reservation price {v} must exceed marginal cost {c}"
                )));
            }
        }
        Ok(Self { c, tau, v })
    }
}

/// Checks that `lambda` is a valid price-sensitive share in (0, 1].
pub fn check_share(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("share must lie in (0, 1], got {lambda}")))
    }
}

/// Hourly shares of price-sensitive consumers, indexed by clock hour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaProfile {
    values: [f64; HOURS],
}

impl LambdaProfile {
    pub fn new(values: [f64; HOURS]) -> Result<Self> {
        for (hour, &v) in values.iter().enumerate() {
            check_share(v).map_err(|_| {
                Error::Domain(format!("share at hour {hour:02}:00 must lie in (0, 1], got {v}"))
            })?;
        }
        Ok(Self { values })
    }

    pub fn constant(lambda: f64) -> Result<Self> {
        Self::new([lambda; HOURS])
    }

    pub fn values(&self) -> &[f64; HOURS] {
        &self.values
    }

    pub fn get(&self, hour: usize) -> f64 {
        self.values[hour]
    }
}

/// Normalized hourly demand weights, indexed by clock hour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightProfile {
    values: [f64; HOURS],
}

impl WeightProfile {
    /// Validates already-normalized weights.
    pub fn new(values: [f64; HOURS]) -> Result<Self> {
        check_positive(&values)?;
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::Domain(format!("weights must sum to 1, got {sum}")));
        }
        Ok(Self { values })
    }

    /// Normalizes raw positive quantities (counts, percentages) to unit sum.
    pub fn from_raw(raw: [f64; HOURS]) -> Result<Self> {
        check_positive(&raw)?;
        let sum: f64 = raw.iter().sum();
        let mut values = raw.map(|q| q / sum);
        // One correction pass pulls the rounding residue into the largest entry.
        let residue = 1.0 - values.iter().sum::<f64>();
        let imax = argmax(&values);
        values[imax] += residue;
        Self::new(values)
    }

    pub fn uniform() -> Self {
        Self {
            values: [1.0 / HOURS as f64; HOURS],
        }
    }

    pub fn values(&self) -> &[f64; HOURS] {
        &self.values
    }

    pub fn get(&self, hour: usize) -> f64 {
        self.values[hour]
    }
}

fn check_positive(values: &[f64; HOURS]) -> Result<()> {
    for (hour, &w) in values.iter().enumerate() {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::Domain(format!(
                "weight at hour {hour:02}:00 must be positive, got {w}"
            )));
        }
    }
    Ok(())
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_reject_nonpositive() {
        assert!(ModelParams::new(0.0, 0.2).is_err());
        assert!(ModelParams::new(1.5, 0.0).is_err());
        assert!(ModelParams::new(1.5, f64::NAN).is_err());
        assert!(ModelParams::with_reservation(1.5, 0.2, Some(1.4)).is_err());
        assert!(ModelParams::with_reservation(1.5, 0.2, Some(2.0)).is_ok());
    }

    #[test]
    fn lambda_bounds() {
        assert!(LambdaProfile::constant(1.0).is_ok());
        assert!(LambdaProfile::constant(0.0).is_err());
        assert!(LambdaProfile::constant(1.0 + 1e-9).is_err());
    }

    #[test]
    fn weights_normalize() {
        let mut raw = [1.0; HOURS];
        raw[3] = 7.0;
        let w = WeightProfile::from_raw(raw).unwrap();
        let sum: f64 = w.values().iter().sum();
        assert!((sum - 1.0).abs() <= WEIGHT_SUM_TOL);
        assert!((w.get(3) - 7.0 / 30.0).abs() < 1e-15);
        assert!(WeightProfile::new(raw).is_err());
        raw[0] = 0.0;
        assert!(WeightProfile::from_raw(raw).is_err());
    }
}
