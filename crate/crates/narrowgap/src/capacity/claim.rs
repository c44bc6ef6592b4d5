use serde::{Deserialize, Serialize};

use super::integrals::{angular_constant, gap_integral, radial_integral, GapIntegralSpec};
use crate::geometry::VanishingOrders;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Regime {
    GammaGt1,
    GammaEq1,
    GammaLt1,
}

impl Regime {
    pub fn of(gamma: f64) -> Regime {
        if (gamma - 1.0).abs() < 1e-12 {
            Regime::GammaEq1
        } else if gamma > 1.0 {
            Regime::GammaGt1
        } else {
            Regime::GammaLt1
        }
    }

    /// Predicted size of the gap integral: 1, log(1/ε) or ε^{γ-1}.
    pub fn predicted(self, gamma: f64, epsilon: f64) -> f64 {
        match self {
            Regime::GammaGt1 => 1.0,
            Regime::GammaEq1 => (1.0 / epsilon).ln(),
            Regime::GammaLt1 => epsilon.powf(gamma - 1.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub epsilon: f64,
    pub integral: f64,
    pub predicted: f64,
    pub ratio: f64,
}

/// Measured sandwich of I(ε)/predicted(ε) over an ε list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeBound {
    pub regime: Regime,
    pub gamma: f64,
    pub measured_lo: f64,
    pub measured_hi: f64,
    pub factor: f64,
    pub success: bool,
    pub rows: Vec<RatioRow>,
}

pub const DEFAULT_CLAIM_FACTOR: f64 = 20.0;

/// Checks that I(ε) tracks its regime prediction within `factor` over
/// `eps_list`, which must span at least three decades inside (0, r²).
pub fn verify_claim(
    orders: &VanishingOrders,
    r: f64,
    n: usize,
    eps_list: &[f64],
    factor: f64,
    tol: f64,
) -> Result<RegimeBound> {
    let (lo, hi) = eps_list.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    if eps_list.is_empty() || (hi / lo).log10() < 3.0 - 1e-9 || !(lo > 0.0) || !(hi < r * r) {
        return Err(Error::InvalidInput(format!(
            "ε list must span >= 3 decades inside (0, r²), got [{lo:e}, {hi:e}] with r = {r}"
        )));
    }
    let gamma = orders.gamma();
    let regime = Regime::of(gamma);
    let mut rows = Vec::with_capacity(eps_list.len());
    for &epsilon in eps_list {
        let spec = GapIntegralSpec::new(orders.clone(), r, n, epsilon)?;
        let integral = gap_integral(&spec, tol)?;
        let predicted = regime.predicted(gamma, epsilon);
        rows.push(RatioRow { epsilon, integral, predicted, ratio: integral / predicted });
    }
    let measured_lo = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let measured_hi = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let success = measured_lo > 0.0 && measured_hi / measured_lo <= factor;
    Ok(RegimeBound { regime, gamma, measured_lo, measured_hi, factor, success, rows })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
    pub angular: f64,
    pub holds: bool,
}

/// Lower and upper radial bounds around the gap integral:
/// K·A·∫_0^{R_0} ≤ I(ε) ≤ K·A·∫_0^{R_1} with K = 2^{n-1} r^{n-1-ℓ}/(α_1···α_ℓ).
/// The comparison allows a relative slack of 10·tol for quadrature error,
/// which matters when ℓ = 1 and both bounds equal the value.
pub fn reduction_sandwich(orders: &VanishingOrders, r: f64, n: usize, epsilon: f64, tol: f64) -> Result<Sandwich> {
    let spec = GapIntegralSpec::new(orders.clone(), r, n, epsilon)?;
    let gamma = spec.gamma();
    if !(gamma > 0.0) {
        return Err(Error::InvalidInput("reduction needs γ > 0".into()));
    }
    let alphas = orders.finite();
    let ell = alphas.len();
    let k = 2f64.powi(n as i32 - 1) * r.powi((n - 1 - ell) as i32) / alphas.iter().product::<f64>();
    let angular = angular_constant(orders)?;
    let value = gap_integral(&spec, tol)?;
    let lower = k * angular * radial_integral(gamma, epsilon, spec.r0())?;
    let upper = k * angular * radial_integral(gamma, epsilon, spec.r1())?;
    let slack = 10.0 * tol;
    let holds = lower <= value * (1.0 + slack) && value <= upper * (1.0 + slack);
    Ok(Sandwich { lower, value, upper, angular, holds })
}
