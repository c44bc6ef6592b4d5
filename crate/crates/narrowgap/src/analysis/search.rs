use std::f64::consts::PI;

use rand::{RngExt, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use super::phi::PhiSpec;
use crate::pde::Session;
use crate::{Error, Result};

/// Angular bins used to resolve the boundary flux densities.
pub const BINS: usize = 256;

/// Half-width, in bins, of the moving average applied to the binned
/// density difference. Single bins hold only a few staircase cuts and are
/// too noisy to shape a bump from.
pub const SMOOTHING: usize = 4;

/// Outcome of the boundary-data search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundarySearch {
    /// The bump, tabulated over the polar angle about the configuration centre.
    pub phi: PhiSpec,
    pub q: f64,
    /// +1 for a nonnegative bump, -1 for a nonpositive one.
    pub sign: f64,
    /// Angular extent of the support, [start, end] going counterclockwise.
    pub arc: [f64; 2],
    /// a_i = -∫_{∂Ω} ∂v_i/∂ν.
    pub a1: f64,
    pub a2: f64,
    /// Largest |Q| over the random trigonometric pool.
    pub pool_best: f64,
    pub beats_random_pool: bool,
}

fn bin_of(t: f64) -> usize {
    (((t + PI) / (2.0 * PI) * BINS as f64) as usize).min(BINS - 1)
}

fn bin_center(b: usize) -> f64 {
    -PI + (b as f64 + 0.5) * 2.0 * PI / BINS as f64
}

/// Builds a nonnegative (or, per the sign rule, nonpositive) bump on the arc
/// of ∂Ω where ∂v1/∂ν - ∂v2/∂ν keeps the sign it has at its largest value,
/// and compares |Q_ε| of that bump with `pool` random low-order
/// trigonometric traces of unit oscillation.
pub fn find_boundary_data(session: &Session, pool: usize, seed: u64) -> Result<BoundarySearch> {
    if pool < 3 {
        return Err(Error::InvalidInput(format!("basis size {pool} < 3")));
    }
    let c = session.config.center;
    let mut d = [0.0; BINS];
    let mut scale = [0.0; BINS];
    for cut in session.omega_flux_terms() {
        let b = bin_of((cut.point[1] - c[1]).atan2(cut.point[0] - c[0]));
        d[b] += cut.flux_v1 - cut.flux_v2;
        scale[b] += cut.flux_v1.abs() + cut.flux_v2.abs();
    }
    let raw = d;
    for (b, v) in d.iter_mut().enumerate() {
        *v = (0..=2 * SMOOTHING).map(|k| raw[(b + BINS + k - SMOOTHING) % BINS]).sum::<f64>()
            / (2 * SMOOTHING + 1) as f64;
    }
    let (peak, dmax) =
        d.iter().enumerate().fold((0, 0.0), |acc, (b, v)| if v.abs() > acc.1 { (b, v.abs()) } else { acc });
    let noise = 1e-9 * scale.iter().sum::<f64>();
    if !(dmax > noise) {
        return Err(Error::Degenerate(format!("|dv1/dnu - dv2/dnu| <= {dmax:e} on all of the outer boundary")));
    }
    let s = d[peak].signum();
    let same = |b: usize| d[b] * s > 0.0;
    let mut lo = peak;
    let mut len = 1;
    while len < BINS && same((lo + BINS - 1) % BINS) {
        lo = (lo + BINS - 1) % BINS;
        len += 1;
    }
    let mut hi = peak;
    while len < BINS && same((hi + 1) % BINS) {
        hi = (hi + 1) % BINS;
        len += 1;
    }
    let (a1, a2) = (-session.flux_omega_v1, -session.flux_omega_v2);
    let sign = if (s < 0.0 && a2 >= a1) || (s > 0.0 && a1 >= a2) { 1.0 } else { -1.0 };
    let mut values = vec![0.0; BINS];
    for k in 0..len {
        let b = (lo + k) % BINS;
        values[b] = sign * (2.0 * d[b].abs() / dmax).min(1.0);
    }
    let angles: Vec<f64> = (0..BINS).map(bin_center).collect();
    let phi = PhiSpec::Tabulated { angles, values };
    let q = session.q_of(&phi.boundary_value(session.config)?)?;

    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut pool_best: f64 = 0.0;
    for _ in 0..pool {
        let harmonics: Vec<[f64; 2]> =
            (0..3).map(|_| [2.0 * rng.random::<f64>() - 1.0, 2.0 * rng.random::<f64>() - 1.0]).collect();
        let spec = normalized_trig(harmonics);
        pool_best = pool_best.max(session.q_of(&spec.boundary_value(session.config)?)?.abs());
    }
    Ok(BoundarySearch {
        phi,
        q,
        sign,
        arc: [bin_center(lo) - PI / BINS as f64, bin_center(hi) + PI / BINS as f64],
        a1,
        a2,
        pool_best,
        beats_random_pool: q.abs() >= pool_best,
    })
}

/// Rescales a trigonometric polynomial to unit oscillation (max - min = 1).
fn normalized_trig(harmonics: Vec<[f64; 2]>) -> PhiSpec {
    let eval = |t: f64| -> f64 {
        harmonics
            .iter()
            .enumerate()
            .map(|(k, [a, b])| a * ((k + 1) as f64 * t).cos() + b * ((k + 1) as f64 * t).sin())
            .sum()
    };
    let (lo, hi) = (0..720)
        .map(|i| eval(2.0 * PI * i as f64 / 720.0))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let k = 1.0 / (hi - lo).max(f64::MIN_POSITIVE);
    PhiSpec::Trig { constant: 0.0, harmonics: harmonics.iter().map(|[a, b]| [a * k, b * k]).collect() }
}
