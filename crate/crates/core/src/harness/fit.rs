use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares line through `(log₂ ε, log₂ metric)`; `slope` is the
/// exponent in `metric ≈ 2^intercept ε^slope`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub metric: String,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub eps_used: Vec<f64>,
}

pub fn fit_power_law(metric: &str, eps: &[f64], values: &[f64]) -> Result<Fit> {
    if eps.len() != values.len() {
        return Err(Error::Domain(format!(
            "{} ε values but {} metric values",
            eps.len(),
            values.len()
        )));
    }
    if eps.len() < 3 {
        return Err(Error::Domain(format!(
            "fitting {metric} needs at least 3 points, got {}",
            eps.len()
        )));
    }
    for (i, &e) in eps.iter().enumerate() {
        if eps[..i].contains(&e) {
            return Err(Error::Domain(format!(
                "degenerate abscissa: ε = {e} appears twice"
            )));
        }
    }
    if let Some((e, v)) = eps
        .iter()
        .zip(values)
        .find(|(e, v)| !(**e > 0.0) || !(**v > 0.0) || !v.is_finite())
    {
        return Err(Error::Domain(format!(
            "{metric} = {v} at ε = {e} cannot be fitted on a log scale"
        )));
    }
    let x: Vec<f64> = eps.iter().map(|e| e.log2()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.log2()).collect();
    let m = x.len() as f64;
    let xm = x.iter().sum::<f64>() / m;
    let ym = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|a| (a - xm).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - xm) * (b - ym)).sum();
    let syy: f64 = y.iter().map(|b| (b - ym).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let sse: f64 = x
        .iter()
        .zip(&y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(Fit {
        metric: metric.to_string(),
        slope,
        intercept,
        r2,
        eps_used: eps.to_vec(),
    })
}

/// Whether `values` (ordered by decreasing ε) never increase by more than
/// the relative tolerance `tol` from one entry to the next.
pub fn monotone_decreasing(values: &[f64], tol: f64) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] * (1.0 + tol))
}
