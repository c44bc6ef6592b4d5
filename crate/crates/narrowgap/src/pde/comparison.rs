use super::field::Field;
use super::grid::Grid;
use crate::capacity::quad::{integrate, peak_breaks, Budget};
use crate::capacity::{DEFAULT_TOL, NODE_BUDGET};
use crate::geometry::{Configuration, GapPatch, Point};
use crate::par;
use crate::{Error, Result};

/// C¹ smoothstep: 0 for t ≤ 0, 1 for t ≥ 1.
pub fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

/// Tensor bump on a patch box: 1 where every local coordinate is within
/// `inner·r`, 0 beyond `outer·r`.
fn bump(patch: &GapPatch, p: Point, inner: f64, outer: f64) -> f64 {
    let q = patch.to_local2(p);
    let r = patch.half_width;
    let one = |x: f64| smoothstep((outer * r - x.abs()) / ((outer - inner) * r));
    one(q[0]) * one(q[1])
}

/// Linear-in-normal gap profile (g - x_n)/(g - f): 1 on the D1 graph, 0 on
/// the D2 graph.
pub fn gap_profile(patch: &GapPatch, p: Point) -> f64 {
    let q = patch.to_local2(p);
    let x = [q[0]];
    let (f, g) = (patch.f.value(&x), patch.g.value(&x));
    ((g - q[1]) / (g - f)).clamp(0.0, 1.0)
}

/// The patched competitor W = ρ w + (1 - ρ) v1 with w = Σ σ_i w_i. σ_i is a
/// bump supported in patch box i, normalized to a partition of unity on the
/// 3r/4 boxes; ρ is 1 on the r/2 boxes and vanishes outside the 3r/4 boxes.
/// W takes the boundary values of `v1`.
pub fn comparison_field(config: &Configuration, grid: &Grid, v1: &Field) -> Result<Field> {
    v1.check(grid)?;
    let patches: Vec<&GapPatch> = config.patches.iter().filter(|p| p.dim() == 2).collect();
    let values: Vec<Result<f64>> = par::map_indexed(grid.len(), |n| {
        let p = config.wrap(grid.point(n));
        let rho = patches.iter().map(|pt| bump(pt, p, 0.5, 0.75)).fold(0.0, f64::max);
        if rho == 0.0 {
            return Ok(v1.values[n]);
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, pt) in patches.iter().enumerate() {
            let s = bump(pt, p, 0.75, 1.0);
            if s == 0.0 {
                continue;
            }
            let q = pt.to_local2(p);
            let (f, g) = (pt.f.value(&[q[0]]), pt.g.value(&[q[0]]));
            let slack = 1e-9 * pt.half_width;
            if !(q[1] > f - slack && q[1] < g + slack) {
                return Err(Error::PatchCover(format!("active node {p:?} in box {i} lies outside the gap band")));
            }
            num += s * gap_profile(pt, p);
            den += s;
        }
        if den == 0.0 {
            return Err(Error::PatchCover(format!("no patch frame covers {p:?}")));
        }
        Ok(rho * num / den + (1.0 - rho) * v1.values[n])
    });
    let values = values.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(Field::new(grid, values, v1.trace.clone()))
}

/// ∫_{Q_r} dx'/(g - f) for one 2D patch: the energy of the profile that
/// drops linearly from 1 to 0 across the gap, a lower bound for the gap part
/// of the Dirichlet energy of v1.
pub fn gap_energy_lower(config: &Configuration, patch: usize) -> Result<f64> {
    let pt = config.patches.get(patch).ok_or_else(|| Error::InvalidInput(format!("no patch {patch}")))?;
    if pt.dim() != 2 {
        return Err(Error::InvalidInput("gap_energy_lower needs a 2D patch".into()));
    }
    let r = pt.half_width;
    let width = match pt.orders.as_slice()[0].finite() {
        Some(a) => config.epsilon.powf(1.0 / (2.0 * a)).min(r),
        None => r,
    };
    let right = peak_breaks(width, r);
    let mut breaks: Vec<f64> = right.iter().rev().map(|x| -x).collect();
    breaks.extend_from_slice(&right[1..]);
    let budget = Budget::new(NODE_BUDGET);
    integrate(
        |x| {
            let w = pt.g.value(&[x]) - pt.f.value(&[x]);
            if w > 0.0 {
                Ok(1.0 / w)
            } else {
                Err(Error::GapViolation { at: vec![x], width: w })
            }
        },
        &breaks,
        DEFAULT_TOL,
        &budget,
    )
}
