//! Gap integrals I(ε) = ∫_{Q_r} dx'/(ε + Σ|x_j|^{2α_j}), their radial
//! reduction, and the three-regime bounds.

mod claim;
mod integrals;
pub mod quad;

pub use claim::{reduction_sandwich, verify_claim, RatioRow, Regime, RegimeBound, Sandwich, DEFAULT_CLAIM_FACTOR};
pub use integrals::{
    angular_constant, gap_integral, gap_integral_mc, radial_integral, sin_cos_integral, GapIntegralSpec, McEstimate,
    DEFAULT_SEED, DEFAULT_TOL, NODE_BUDGET,
};
