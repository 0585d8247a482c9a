//! Evaluation and ranking of all 24 candidate reset hours.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{
    flat_lower_bound, solve_constrained_path, unrestricted_path, weighted_average_price, EquilibriumPath,
    LambdaProfile, ModelParams, WeightProfile,
};
use crate::HOURS;

pub use crate::hours::{rotate, unrotate};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResetEvaluation {
    pub reset_hour: usize,
    pub path: EquilibriumPath,
    pub weighted_avg: f64,
    /// Unrestricted weighted average minus `weighted_avg`.
    pub saving: f64,
    pub block_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Indexed by reset hour.
    pub evaluations: Vec<ResetEvaluation>,
    pub unrestricted_avg: f64,
    pub bound: f64,
    pub optimal_hour: usize,
}

pub fn evaluate_reset_hour(
    reset_hour: usize,
    params: &ModelParams,
    lambdas: &LambdaProfile,
    weights: &WeightProfile,
) -> Result<ResetEvaluation> {
    let unrestricted = weighted_average_price(&unrestricted_path(params, lambdas), weights);
    evaluate_against(reset_hour, params, lambdas, weights, unrestricted)
}

fn evaluate_against(
    reset_hour: usize,
    params: &ModelParams,
    lambdas: &LambdaProfile,
    weights: &WeightProfile,
    unrestricted_avg: f64,
) -> Result<ResetEvaluation> {
    let path = solve_constrained_path(params, lambdas, weights, reset_hour)?;
    let weighted_avg = weighted_average_price(&path.prices_clock, weights);
    Ok(ResetEvaluation {
        reset_hour,
        block_count: path.block_count(),
        saving: unrestricted_avg - weighted_avg,
        weighted_avg,
        path,
    })
}

pub fn sweep_all(params: &ModelParams, lambdas: &LambdaProfile, weights: &WeightProfile) -> Result<SweepResult> {
    let unrestricted_avg = weighted_average_price(&unrestricted_path(params, lambdas), weights);
    let evaluations = (0..HOURS)
        .map(|r| evaluate_against(r, params, lambdas, weights, unrestricted_avg))
        .collect::<Result<Vec<_>>>()?;
    let optimal_hour = evaluations
        .iter()
        .fold(0, |best, e| if e.weighted_avg < evaluations[best].weighted_avg { e.reset_hour } else { best });
    Ok(SweepResult {
        evaluations,
        unrestricted_avg,
        bound: flat_lower_bound(params, lambdas, weights),
        optimal_hour,
    })
}

impl SweepResult {
    /// Evaluations sorted ascending by weighted average, earliest hour first on ties.
    pub fn ranking(&self) -> Vec<&ResetEvaluation> {
        let mut ranked: Vec<&ResetEvaluation> = self.evaluations.iter().collect();
        ranked.sort_by(|a, b| {
            a.weighted_avg
                .total_cmp(&b.weighted_avg)
                .then(a.reset_hour.cmp(&b.reset_hour))
        });
        ranked
    }

    pub fn optimal(&self) -> &ResetEvaluation {
        &self.evaluations[self.optimal_hour]
    }
}

/// Currency in which report tables are written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Units {
    Cent,
    Currency,
}

impl Units {
    pub fn scale(self) -> f64 {
        match self {
            Units::Cent => 100.0,
            Units::Currency => 1.0,
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            Units::Cent => "_ct",
            Units::Currency => "",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Units::Cent => "ct/l",
            Units::Currency => "/l",
        }
    }

    /// Formats a currency-per-liter amount for reports.
    pub fn format(self, value: f64) -> String {
        match self {
            Units::Cent => format!("{:.3}", value * 100.0),
            Units::Currency => format!("{value}"),
        }
    }
}

impl std::str::FromStr for Units {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cent" | "ct" | "cents" => Ok(Units::Cent),
            "currency" | "eur" | "euro" => Ok(Units::Currency),
            other => Err(crate::Error::Input(format!("unknown units '{other}'"))),
        }
    }
}

/// Writes `rank,hour,weighted_avg_ct,saving_ct,blocks`.
pub fn write_ranking<W: Write>(out: W, sweep: &SweepResult, units: Units) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let sfx = units.suffix();
    w.write_record([
        "rank".to_string(),
        "hour".to_string(),
        format!("weighted_avg{sfx}"),
        format!("saving{sfx}"),
        "blocks".to_string(),
    ])?;
    for (i, e) in sweep.ranking().iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            e.reset_hour.to_string(),
            units.format(e.weighted_avg),
            units.format(e.saving),
            e.block_count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `reset_hour,clock_hour,price` for all 24 x 24 constrained prices,
/// full precision, currency per liter.
pub fn write_paths<W: Write>(out: W, sweep: &SweepResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["reset_hour", "clock_hour", "price"])?;
    for e in &sweep.evaluations {
        for (h, p) in e.path.prices_clock.iter().enumerate() {
            w.write_record([e.reset_hour.to_string(), h.to_string(), p.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}
