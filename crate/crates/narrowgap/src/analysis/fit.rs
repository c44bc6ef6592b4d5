use serde::{Deserialize, Serialize};

use super::sweep::{Quantity, SweepTable};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FitModel {
    /// q ≈ A ε^p, least squares in log-log.
    Power,
    /// q ≈ A / (ε log(1/ε)); only the constant is fitted.
    PowerLog,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FitModel,
    /// Fitted slope for POWER; -1 for POWER_LOG, whose shape is fixed.
    pub exponent: f64,
    pub amplitude: f64,
    pub r_squared: f64,
    /// Coefficient of variation of q·ε·log(1/ε) for POWER_LOG, 0 otherwise.
    pub dispersion: f64,
    /// log-space residuals in input order.
    pub residuals: Vec<f64>,
}

/// Fits `q(ε)` over the given points.
pub fn fit_points(eps: &[f64], q: &[f64], model: FitModel) -> Result<FitResult> {
    if eps.len() != q.len() {
        return Err(Error::InvalidInput("epsilon and quantity lengths differ".into()));
    }
    if eps.len() < 4 {
        return Err(Error::InsufficientRows(eps.len()));
    }
    for (e, v) in eps.iter().zip(q) {
        if !(*v > 0.0 && v.is_finite()) {
            return Err(Error::NonPositive { quantity: format!("{v}"), epsilon: *e });
        }
        if !(*e > 0.0 && *e < 1.0) {
            return Err(Error::InvalidInput(format!("epsilon {e} outside (0, 1)")));
        }
    }
    let x: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let y: Vec<f64> = q.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let my = y.iter().sum::<f64>() / n;
    let ss_tot: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    match model {
        FitModel::Power => {
            let mx = x.iter().sum::<f64>() / n;
            let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
            let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
            let slope = sxy / sxx;
            let icpt = my - slope * mx;
            let residuals: Vec<f64> = x.iter().zip(&y).map(|(a, b)| b - (icpt + slope * a)).collect();
            let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
            let r_squared = if ss_tot > 0.0 { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) } else { 1.0 };
            Ok(FitResult { model, exponent: slope, amplitude: icpt.exp(), r_squared, dispersion: 0.0, residuals })
        }
        FitModel::PowerLog => {
            let scaled: Vec<f64> = eps.iter().zip(q).map(|(e, v)| v * e * (1.0 / e).ln()).collect();
            let mean = scaled.iter().sum::<f64>() / n;
            let var = scaled.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
            let residuals: Vec<f64> = scaled.iter().map(|s| (s / mean).ln()).collect();
            let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
            let r_squared = if ss_tot > 0.0 { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) } else { 1.0 };
            Ok(FitResult {
                model,
                exponent: -1.0,
                amplitude: mean,
                r_squared,
                dispersion: var.sqrt() / mean,
                residuals,
            })
        }
    }
}

/// Fits one column of a sweep table over its unflagged rows.
pub fn fit_exponent(table: &SweepTable, quantity: Quantity, model: FitModel) -> Result<FitResult> {
    if model == FitModel::PowerLog && (table.gamma - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!("POWER_LOG applies only when gamma = 1 (table has {})", table.gamma)));
    }
    let (eps, q) = table.series(quantity);
    fit_points(&eps, &q, model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let eps = [0.1, 0.05, 0.025, 0.0125];
        let q: Vec<f64> = eps.iter().map(|e: &f64| 2.0 * e.powf(-0.5)).collect();
        let f = fit_points(&eps, &q, FitModel::Power).unwrap();
        assert!((f.exponent + 0.5).abs() < 1e-12);
        assert!((f.amplitude - 2.0).abs() < 1e-12);
        assert_eq!(f.r_squared, 1.0);
    }

    #[test]
    fn exact_power_log() {
        let eps = [0.1, 0.01, 0.001, 0.0001];
        let q: Vec<f64> = eps.iter().map(|e: &f64| 3.0 / (e * (1.0 / e).ln())).collect();
        let f = fit_points(&eps, &q, FitModel::PowerLog).unwrap();
        assert!((f.amplitude - 3.0).abs() < 1e-12);
        assert!(f.dispersion < 1e-12);
    }

    #[test]
    fn rejects_short_and_nonpositive() {
        assert!(matches!(fit_points(&[0.1, 0.2], &[1.0, 2.0], FitModel::Power), Err(Error::InsufficientRows(2))));
        let r = fit_points(&[0.1, 0.05, 0.02, 0.01], &[1.0, 0.0, 1.0, 1.0], FitModel::Power);
        assert!(matches!(r, Err(Error::NonPositive { .. })));
    }
}
