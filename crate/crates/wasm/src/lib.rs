//! Browser bindings for the reset-hour model.
//!
//! Every exported function takes plain arrays of 24 hourly values and returns
//! a JSON-shaped object. The `*_report` functions hold the logic and run
//! natively so they can be unit tested.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use reset_hour_core::calibration::{infer_lambda, lambda_band, CalibrationResult, PriceProfile};
use reset_hour_core::fixtures::{weekday_sample_prices, weekday_sample_weights};
use reset_hour_core::model::{solve_constrained_path, unrestricted_path, weighted_average_price};
use reset_hour_core::sweep::sweep_all;
use reset_hour_core::{Error, WeightProfile, HOURS};

#[derive(Debug, Serialize)]
pub struct RankRow {
    pub hour: usize,
    pub weighted_avg: f64,
    pub saving: f64,
    pub blocks: usize,
}

#[derive(Debug, Serialize)]
pub struct SweepReport {
    pub tau: f64,
    pub lambdas: Vec<f64>,
    pub unrestricted_avg: f64,
    pub flat_bound: f64,
    pub optimal_hour: usize,
    pub ranking: Vec<RankRow>,
}

#[derive(Debug, Serialize)]
pub struct BlockRow {
    pub start_hour: usize,
    pub hours: usize,
    pub lambda_bar: f64,
    pub price: f64,
}

#[derive(Debug, Serialize)]
pub struct PathReport {
    pub reset_hour: usize,
    pub observed: Vec<f64>,
    pub regulated: Vec<f64>,
    pub weighted_avg: f64,
    pub saving: f64,
    pub blocks: Vec<BlockRow>,
}

#[derive(Debug, Serialize)]
pub struct BandRow {
    pub hour: usize,
    pub low: f64,
    pub high: f64,
}

fn hourly(values: &[f64], what: &str) -> Result<[f64; HOURS], Error> {
    values
        .try_into()
        .map_err(|_| Error::Input(format!("{what}: expected {HOURS} values, got {}", values.len())))
}

fn calibrate(prices: &[f64], weights: &[f64], c: f64) -> Result<(CalibrationResult, WeightProfile), Error> {
    let profile = PriceProfile::new(hourly(prices, "prices")?)?;
    let weights = WeightProfile::from_raw(hourly(weights, "weights")?)?;
    Ok((infer_lambda(&profile, c)?, weights))
}

pub fn sweep_report(prices: &[f64], weights: &[f64], c: f64) -> Result<SweepReport, Error> {
    let (cal, weights) = calibrate(prices, weights, c)?;
    let sweep = sweep_all(&cal.params, &cal.lambdas, &weights)?;
    Ok(SweepReport {
        tau: cal.params.tau,
        lambdas: cal.lambdas.values().to_vec(),
        unrestricted_avg: sweep.unrestricted_avg,
        flat_bound: sweep.bound,
        optimal_hour: sweep.optimal_hour,
        ranking: sweep
            .ranking()
            .into_iter()
            .map(|e| RankRow {
                hour: e.reset_hour,
                weighted_avg: e.weighted_avg,
                saving: e.saving,
                blocks: e.block_count,
            })
            .collect(),
    })
}

pub fn path_report(prices: &[f64], weights: &[f64], c: f64, reset_hour: usize) -> Result<PathReport, Error> {
    let (cal, weights) = calibrate(prices, weights, c)?;
    let path = solve_constrained_path(&cal.params, &cal.lambdas, &weights, reset_hour)?;
    let observed = unrestricted_path(&cal.params, &cal.lambdas);
    let weighted_avg = weighted_average_price(&path.prices_clock, &weights);
    Ok(PathReport {
        reset_hour,
        observed: observed.to_vec(),
        regulated: path.prices_clock.to_vec(),
        weighted_avg,
        saving: weighted_average_price(&observed, &weights) - weighted_avg,
        blocks: path
            .partition
            .blocks
            .iter()
            .map(|b| BlockRow {
                start_hour: (reset_hour + b.start_k) % HOURS,
                hours: b.len(),
                lambda_bar: b.lambda_bar,
                price: b.price,
            })
            .collect(),
    })
}

pub fn band_report(prices: &[f64], costs: &[f64]) -> Result<Vec<BandRow>, Error> {
    let profile = PriceProfile::new(hourly(prices, "prices")?)?;
    let results = costs
        .iter()
        .map(|&c| infer_lambda(&profile, c))
        .collect::<Result<Vec<_>, _>>()?;
    let band = lambda_band(&results).ok_or_else(|| Error::Input("no marginal costs given".into()))?;
    Ok(band
        .iter()
        .enumerate()
        .map(|(hour, &(low, high))| BandRow { hour, low, high })
        .collect())
}

fn to_js<T: Serialize>(value: Result<T, Error>) -> Result<JsValue, JsError> {
    let value = value.map_err(|e| JsError::new(&e.to_string()))?;
    serde_wasm_bindgen::to_value(&value).map_err(|e| JsError::new(&e.to_string()))
}

/// Calibrates shares at marginal cost `c` and ranks all 24 reset hours.
#[wasm_bindgen(js_name = sweep)]
pub fn sweep_js(prices: &[f64], weights: &[f64], c: f64) -> Result<JsValue, JsError> {
    to_js(sweep_report(prices, weights, c))
}

/// Observed and regulated hourly prices for one reset hour.
#[wasm_bindgen(js_name = constrainedPath)]
pub fn constrained_path_js(prices: &[f64], weights: &[f64], c: f64, reset_hour: usize) -> Result<JsValue, JsError> {
    to_js(path_report(prices, weights, c, reset_hour))
}

/// Per-hour share envelope across a set of marginal costs.
#[wasm_bindgen(js_name = lambdaBand)]
pub fn lambda_band_js(prices: &[f64], costs: &[f64]) -> Result<JsValue, JsError> {
    to_js(band_report(prices, costs))
}

#[wasm_bindgen(js_name = samplePrices)]
pub fn sample_prices() -> Vec<f64> {
    weekday_sample_prices().prices.to_vec()
}

#[wasm_bindgen(js_name = sampleWeights)]
pub fn sample_weights() -> Vec<f64> {
    weekday_sample_weights().values().to_vec()
}
