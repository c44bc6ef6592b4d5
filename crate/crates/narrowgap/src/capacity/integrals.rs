use rand::{RngExt, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use super::quad::{integrate, peak_breaks, Budget};
use crate::geometry::VanishingOrders;
use crate::par;
use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const NODE_BUDGET: usize = 10_000_000;
pub const DEFAULT_SEED: u64 = 0x5EED;

/// The model gap integral ∫_{Q_r} dx' / (ε + Σ_j |x_j|^{2α_j}).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapIntegralSpec {
    pub orders: VanishingOrders,
    pub r: f64,
    pub n: usize,
    pub epsilon: f64,
}

impl GapIntegralSpec {
    pub fn new(orders: VanishingOrders, r: f64, n: usize, epsilon: f64) -> Result<Self> {
        let s = GapIntegralSpec { orders, r, n, epsilon };
        s.check()?;
        Ok(s)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.r > 0.0) || self.n < 2 || self.orders.dim() != self.n || !(self.epsilon > 0.0) {
            return Err(Error::InvalidInput(format!(
                "gap integral needs r > 0, n >= 2, n - 1 orders and ε > 0 (r = {}, n = {}, orders {}, ε = {})",
                self.r, self.n, self.orders, self.epsilon
            )));
        }
        Ok(())
    }

    pub fn gamma(&self) -> f64 {
        self.orders.gamma()
    }

    /// min_j r^{α_j} over the finite orders.
    pub fn r0(&self) -> f64 {
        self.orders.finite().iter().map(|a| self.r.powf(*a)).fold(f64::INFINITY, f64::min)
    }

    /// √ℓ · max_j r^{α_j} over the finite orders.
    pub fn r1(&self) -> f64 {
        let m = self.orders.finite().iter().map(|a| self.r.powf(*a)).fold(0.0, f64::max);
        (self.orders.ell() as f64).sqrt() * m
    }

    /// 2^{n-1} r^{n-1-ℓ}: the symmetry factor times the infinite directions.
    fn prefactor(&self) -> f64 {
        2f64.powi(self.n as i32 - 1) * self.r.powi((self.n - 1 - self.orders.ell()) as i32)
    }
}

/// Adaptive tensor quadrature of the gap integral to relative tolerance
/// `tol`, integrating the positive orthant of the finite directions.
pub fn gap_integral(spec: &GapIntegralSpec, tol: f64) -> Result<f64> {
    spec.check()?;
    if !(tol > 0.0 && tol <= 1e-2) {
        return Err(Error::InvalidInput(format!("tolerance {tol} outside (0, 1e-2]")));
    }
    let alphas = spec.orders.finite();
    if alphas.is_empty() {
        return Ok(spec.prefactor() / spec.epsilon);
    }
    let budget = Budget::new(NODE_BUDGET);
    let inner_tol = tol / 4.0;
    let v = nested(&alphas, spec.r, spec.epsilon, tol, inner_tol, &budget)?;
    Ok(spec.prefactor() * v)
}

fn nested(alphas: &[f64], r: f64, base: f64, tol: f64, inner_tol: f64, budget: &Budget) -> Result<f64> {
    let (a, rest) = alphas.split_first().expect("at least one order");
    let p = 2.0 * a;
    let breaks = peak_breaks(base.powf(1.0 / p), r);
    if rest.is_empty() {
        integrate(|x| Ok(1.0 / (base + x.powf(p))), &breaks, tol, budget)
    } else {
        integrate(|x| nested(rest, r, base + x.powf(p), inner_tol, inner_tol, budget), &breaks, tol, budget)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

const MC_BLOCK: usize = 1 << 14;

/// Monte Carlo estimate with uniform samples on Q_r. Samples are drawn in
/// fixed blocks, each from its own generator seeded by (seed, block), so the
/// result does not depend on scheduling.
pub fn gap_integral_mc(spec: &GapIntegralSpec, samples: usize, seed: u64) -> Result<McEstimate> {
    spec.check()?;
    if samples < 10_000 {
        return Err(Error::InvalidInput(format!("need >= 10^4 samples, got {samples}")));
    }
    let m = spec.n - 1;
    let powers: Vec<Option<f64>> = spec.orders.as_slice().iter().map(|o| o.finite().map(|a| 2.0 * a)).collect();
    let blocks = samples.div_ceil(MC_BLOCK);
    let stats = par::map_indexed(blocks, |b| {
        let count = MC_BLOCK.min(samples - b * MC_BLOCK);
        let mut rng = SplitMix64::seed_from_u64(block_seed(seed, b as u64));
        let mut mean = 0.0;
        let mut m2 = 0.0;
        for k in 0..count {
            let mut s = spec.epsilon;
            for p in powers.iter().take(m) {
                let x: f64 = spec.r * (2.0 * rng.random::<f64>() - 1.0);
                if let Some(p) = p {
                    s += x.abs().powf(*p);
                }
            }
            let v = 1.0 / s;
            let d = v - mean;
            mean += d / (k + 1) as f64;
            m2 += d * (v - mean);
        }
        (count as f64, mean, m2)
    });
    // Chan's pairwise combination, in block order.
    let (mut n, mut mean, mut m2) = (0.0, 0.0, 0.0);
    for (nb, mb, m2b) in stats {
        let tot = n + nb;
        let d = mb - mean;
        mean += d * nb / tot;
        m2 += m2b + d * d * n * nb / tot;
        n = tot;
    }
    let vol = (2.0 * spec.r).powi(m as i32);
    let var = m2 / (n - 1.0);
    Ok(McEstimate { estimate: vol * mean, stderr: vol * (var / n).sqrt() })
}

fn block_seed(seed: u64, block: u64) -> u64 {
    // splitmix finalizer over the pair keeps neighbouring blocks unrelated
    let mut z = seed ^ block.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// ∫_0^R ρ^{2γ-1} / (ε + ρ²) dρ.
pub fn radial_integral(gamma: f64, epsilon: f64, r: f64) -> Result<f64> {
    if !(gamma > 0.0 && epsilon > 0.0 && r > 0.0) {
        return Err(Error::InvalidInput(format!(
            "radial integral needs γ, ε, R > 0 (γ = {gamma}, ε = {epsilon}, R = {r})"
        )));
    }
    if gamma == 1.0 {
        return Ok(0.5 * (r * r / epsilon).ln_1p());
    }
    // With v = ρ/√ε the integral is ε^{γ-1} ∫_0^V v^β/(1+v²) dv, β = 2γ - 1.
    let beta = 2.0 * gamma - 1.0;
    let v_max = r / epsilon.sqrt();
    let budget = Budget::new(NODE_BUDGET);
    let tol = 1e-13;
    // Near 0: v = s^k with k = 1/(β+1) absorbs v^β dv into k ds.
    let k = 1.0 / (beta + 1.0);
    let a = v_max.min(1.0);
    let s_max = a.powf(beta + 1.0);
    let head = integrate(|s| Ok(k / (1.0 + s.powf(2.0 * k))), &[0.0, 0.5 * s_max, s_max], tol, &budget)?;
    let tail = if v_max > 1.0 {
        // v = e^t on [1, V].
        let t_max = v_max.ln();
        let pieces = (t_max.ceil() as usize).max(1);
        let breaks: Vec<f64> = (0..=pieces).map(|j| t_max * j as f64 / pieces as f64).collect();
        integrate(|t| Ok(((beta + 1.0) * t).exp() / (1.0 + (2.0 * t).exp())), &breaks, tol, &budget)?
    } else {
        0.0
    };
    Ok(epsilon.powf(gamma - 1.0) * (head + tail))
}

/// The angular constant A = Π_{q=1}^{ℓ-1} ∫_0^{π/2} sin^{a_q}φ cos^{b_q}φ dφ
/// with a_q = -1 + Σ_{j>q} 1/α_j and b_q = -1 + 1/α_q; 1 when ℓ <= 1.
pub fn angular_constant(orders: &VanishingOrders) -> Result<f64> {
    let alphas = orders.finite();
    let mut prod = 1.0;
    for q in 0..alphas.len().saturating_sub(1) {
        let a = -1.0 + alphas[q + 1..].iter().map(|x| 1.0 / x).sum::<f64>();
        let b = -1.0 + 1.0 / alphas[q];
        assert!(a > -1.0 && b > -1.0, "angular exponents must exceed -1");
        prod *= sin_cos_integral(a, b)?;
    }
    Ok(prod)
}

/// ∫_0^{π/2} sin^a φ cos^b φ dφ for a, b > -1. Each half is mapped by a power
/// substitution that absorbs the endpoint singularity exactly.
pub fn sin_cos_integral(a: f64, b: f64) -> Result<f64> {
    let budget = Budget::new(NODE_BUDGET);
    let half = |a: f64, b: f64| -> Result<f64> {
        // φ = t^k, k = 1/(a+1): φ^a dφ = k dt.
        let k = 1.0 / (a + 1.0);
        let t_max = std::f64::consts::FRAC_PI_4.powf(a + 1.0);
        integrate(
            |t| {
                let phi = t.powf(k);
                let ratio = if phi > 0.0 { phi.sin() / phi } else { 1.0 };
                Ok(k * ratio.powf(a) * phi.cos().powf(b))
            },
            &[0.0, 0.5 * t_max, t_max],
            1e-14,
            &budget,
        )
    };
    Ok(half(a, b)? + half(b, a)?)
}
