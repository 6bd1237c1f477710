use super::{AnalysisError, RegretEstimate};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `regret = C·n^γ`: least squares of `ln R` on `ln n`.
    PowerLawN,
    /// `regret = C·(ln n)^γ`: least squares of `ln R` on `ln ln n`.
    Polylog,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FitModel,
    /// The fitted `γ`.
    pub exponent_or_coeff: f64,
    /// `ln C`.
    pub intercept: f64,
    pub r2: f64,
    pub grid: Vec<usize>,
    /// Grid points dropped because their mean regret was not positive.
    pub excluded: Vec<usize>,
    pub note: Option<String>,
}

pub fn fit_scaling(estimates: &[RegretEstimate], model: FitModel) -> Result<FitResult, AnalysisError> {
    let pts: Vec<(usize, f64)> = estimates.iter().map(|e| (e.n, e.mean_regret)).collect();
    fit_points(&pts, model)
}

/// Fits `model` to `(n, mean regret)` pairs.
pub fn fit_points(points: &[(usize, f64)], model: FitModel) -> Result<FitResult, AnalysisError> {
    let min_n = if model == FitModel::Polylog { 3 } else { 1 };
    let (kept, excluded): (Vec<_>, Vec<_>) = points.iter().partition(|(n, r)| *r > 0.0 && r.is_finite() && *n >= min_n);
    if kept.len() < 3 {
        return Err(AnalysisError::Param(format!(
            "fit needs at least 3 points with positive regret, got {}",
            kept.len()
        )));
    }
    let xs: Vec<f64> = kept
        .iter()
        .map(|(n, _)| match model {
            FitModel::PowerLawN => (*n as f64).ln(),
            FitModel::Polylog => (*n as f64).ln().ln(),
        })
        .collect();
    let ys: Vec<f64> = kept.iter().map(|(_, r)| r.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(AnalysisError::Param("fit needs at least two distinct n".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) };
    let excluded: Vec<usize> = excluded.iter().map(|(n, _)| *n).collect();
    let note = (!excluded.is_empty()).then(|| format!("excluded {} grid points with nonpositive regret", excluded.len()));
    Ok(FitResult {
        model,
        exponent_or_coeff: slope,
        intercept,
        r2,
        grid: kept.iter().map(|(n, _)| *n).collect(),
        excluded,
        note,
    })
}
