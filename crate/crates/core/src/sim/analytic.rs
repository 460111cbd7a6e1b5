use serde::Serialize;

use crate::error::{KqiError, Result};

/// Continuous-model predictions for a node that arrived when the network
/// weight was `W(t_i)`, observed at `W(t) = r * W(t_i)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnalyticPrediction {
    pub degree: f64,
    pub contain_proportion: f64,
    pub volume: f64,
    pub kqi_approx: f64,
}

/// `r^(m/(m+1))`.
pub fn predicted_degree(m: u32, r: f64) -> f64 {
    let m = m as f64;
    r.powf(m / (m + 1.0))
}

pub fn analytic_predictions(m: u32, r: f64, weight_at_arrival: f64) -> Result<AnalyticPrediction> {
    if m == 0 {
        return Err(KqiError::InvalidConfig("m must be at least 1".into()));
    }
    if !(r.is_finite() && r >= 1.0) {
        return Err(KqiError::InvalidConfig(format!("ratio {r} must be at least 1")));
    }
    if !(weight_at_arrival.is_finite() && weight_at_arrival > 0.0) {
        return Err(KqiError::InvalidConfig(format!(
            "arrival weight {weight_at_arrival} must be positive"
        )));
    }
    let mf = m as f64;
    let wi = weight_at_arrival;
    let wt = r * wi;
    // W(t) < W(t_i)^(m+2) / m^(m+1), compared in log space
    if wt.ln() >= (mf + 2.0) * wi.ln() - (mf + 1.0) * mf.ln() {
        return Err(KqiError::ValidityGuard(format!(
            "W(t) = {wt} too large for W(t_i) = {wi} at m = {m}"
        )));
    }
    let volume = mf * mf / (mf + 2.0) * (r.powf((mf + 2.0) / (mf + 1.0)) - 1.0);
    Ok(AnalyticPrediction {
        degree: predicted_degree(m, r),
        contain_proportion: mf / wi * r.powf(1.0 / (mf + 1.0)),
        volume,
        kqi_approx: volume / wt,
    })
}
