//! Published weekday hourly profile: E5 prices, inferred shares and traffic
//! weights for February weekdays, as printed to three decimals.
//!
//! The printed prices round the 07:00 peak and 19:00 trough to a tenth of a
//! cent; [`weekday_sample_prices`] substitutes their four-decimal values (187.92
//! and 178.13 ct) so the calibrated shares match the printed share column.

use crate::calibration::{infer_lambda, CalibrationResult, PriceProfile};
use crate::model::{LambdaProfile, ModelParams, WeightProfile};
use crate::HOURS;

pub const BASELINE_COST: f64 = 1.50;
pub const COST_GRID: [f64; 3] = [1.45, 1.50, 1.55];

/// Hourly prices in currency per liter, as printed.
pub const PRINTED_PRICES: [f64; HOURS] = [
    1.804, 1.805, 1.805, 1.805, 1.805, 1.816, 1.833, 1.879, //
    1.837, 1.828, 1.819, 1.791, 1.809, 1.803, 1.804, 1.795, //
    1.792, 1.784, 1.786, 1.781, 1.786, 1.782, 1.789, 1.802,
];

/// Inferred shares at `c = 1.50`, as printed.
pub const PRINTED_LAMBDAS: [f64; HOURS] = [
    0.924, 0.921, 0.921, 0.921, 0.921, 0.892, 0.844, 0.742, //
    0.834, 0.858, 0.881, 0.967, 0.910, 0.929, 0.926, 0.953, //
    0.965, 0.989, 0.982, 1.000, 0.985, 0.998, 0.975, 0.931,
];

/// Traffic weights in percent, as printed (they sum to 100.02).
pub const PRINTED_WEIGHTS_PCT: [f64; HOURS] = [
    0.33, 0.19, 0.15, 0.21, 0.72, 3.04, 5.47, 7.53, //
    5.92, 5.08, 5.02, 5.26, 5.93, 6.63, 7.31, 8.03, //
    8.61, 7.74, 5.85, 3.73, 2.60, 2.10, 1.69, 0.88,
];

pub const PEAK_HOUR: usize = 7;
pub const PEAK_PRICE: f64 = 1.8792;
pub const TROUGH_HOUR: usize = 19;
pub const TROUGH_PRICE: f64 = 1.7813;

/// Weighted average prices in ct/l reported for the baseline sweep.
pub const REPORTED_UNRESTRICTED_AVG_CT: f64 = 180.874;
pub const REPORTED_BEST_AVG_CT: f64 = 180.674;
pub const REPORTED_BEST_SAVING_CT: f64 = 0.199;
pub const REPORTED_BEST_HOUR: usize = 11;
pub const REPORTED_RUNNER_UP_HOURS: [usize; 4] = [13, 14, 15, 10];

/// Printed prices with the peak and trough refined to four decimals.
pub fn weekday_sample_prices() -> PriceProfile {
    let mut prices = PRINTED_PRICES;
    prices[PEAK_HOUR] = PEAK_PRICE;
    prices[TROUGH_HOUR] = TROUGH_PRICE;
    PriceProfile::new(prices).expect("fixture prices are positive")
}

pub fn weekday_sample_weights() -> WeightProfile {
    WeightProfile::from_raw(PRINTED_WEIGHTS_PCT).expect("fixture weights are positive")
}

#[derive(Debug, Clone)]
pub struct WeekdaySample {
    pub prices: PriceProfile,
    pub calibration: CalibrationResult,
    pub params: ModelParams,
    pub lambdas: LambdaProfile,
    pub weights: WeightProfile,
}

/// The fixture calibrated at marginal cost `c`.
pub fn weekday_sample_with_cost(c: f64) -> WeekdaySample {
    let prices = weekday_sample_prices();
    let calibration = infer_lambda(&prices, c).expect("c below the trough price");
    WeekdaySample {
        params: calibration.params,
        lambdas: calibration.lambdas,
        weights: weekday_sample_weights(),
        calibration,
        prices,
    }
}

pub fn weekday_sample() -> WeekdaySample {
    weekday_sample_with_cost(BASELINE_COST)
}
