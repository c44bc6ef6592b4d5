use super::grid::{BoundaryClass, Grid};
use crate::geometry::Point;
use crate::par;
use crate::{Error, Result};

/// Values on the active nodes of one grid plus the Dirichlet trace at each
/// cut point.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid_id: u64,
    pub values: Vec<f64>,
    pub trace: Vec<f64>,
}

impl Field {
    pub fn new(grid: &Grid, values: Vec<f64>, trace: Vec<f64>) -> Field {
        assert_eq!(values.len(), grid.len(), "one value per active node");
        assert_eq!(trace.len(), grid.cuts.len(), "one trace value per cut");
        Field { grid_id: grid.id(), values, trace }
    }

    /// `c` at every node and cut.
    pub fn constant(grid: &Grid, c: f64) -> Field {
        Field::new(grid, vec![c; grid.len()], vec![c; grid.cuts.len()])
    }

    /// Samples `f` at nodes and cut points.
    pub fn from_fn(grid: &Grid, f: impl Fn(Point) -> f64 + Sync + Send) -> Field {
        let values = par::map_indexed(grid.len(), |n| f(grid.point(n)));
        let trace = par::map_indexed(grid.cuts.len(), |c| f(grid.cuts[c].point));
        Field::new(grid, values, trace)
    }

    pub fn grid_id(&self) -> u64 {
        self.grid_id
    }

    pub fn check(&self, grid: &Grid) -> Result<()> {
        if self.grid_id == grid.id() {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `Σ c_k f_k` over fields of the same grid.
    pub fn combine(terms: &[(f64, &Field)]) -> Result<Field> {
        let (_, first) = terms.first().ok_or_else(|| Error::InvalidInput("empty combination".into()))?;
        if terms.iter().any(|(_, f)| f.grid_id != first.grid_id) {
            return Err(Error::GridMismatch);
        }
        let mix = |n: usize, pick: &(dyn Fn(&Field) -> &[f64] + Sync)| -> Vec<f64> {
            par::map_indexed(n, |i| terms.iter().map(|(c, f)| c * pick(f)[i]).sum())
        };
        Ok(Field {
            grid_id: first.grid_id,
            values: mix(first.values.len(), &|f| &f.values),
            trace: mix(first.trace.len(), &|f| &f.trace),
        })
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Value at the far end of arm `d` of node `n`.
    fn across(&self, grid: &Grid, n: usize, d: usize) -> f64 {
        let a = grid.arms[n][d];
        if a.is_cut {
            self.trace[a.target as usize]
        } else {
            self.values[a.target as usize]
        }
    }
}

/// Discrete Dirichlet inner product: every lattice link once plus every cut
/// arm against its boundary value, each weighted by dual width over length.
pub fn energy_inner(grid: &Grid, f: &Field, g: &Field) -> Result<f64> {
    energy_inner_in(grid, f, g, |_| true)
}

/// Part of [`energy_inner`] from links with both ends selected by `mask`
/// and cut arms of selected nodes.
pub fn energy_inner_in<M>(grid: &Grid, f: &Field, g: &Field, mask: M) -> Result<f64>
where
    M: Fn(usize) -> bool + Sync + Send,
{
    f.check(grid)?;
    g.check(grid)?;
    Ok(par::chunked_sum(grid.len(), |range| {
        let mut s = 0.0;
        for n in range {
            if !mask(n) {
                continue;
            }
            for (d, a) in grid.arms[n].iter().enumerate() {
                if a.is_cut {
                    let c = a.target as usize;
                    s += a.weight * (f.trace[c] - f.values[n]) * (g.trace[c] - g.values[n]);
                } else if (d == 0 || d == 2) && mask(a.target as usize) {
                    // East and north links only, so each link counts once.
                    let m = a.target as usize;
                    s += a.weight * (f.values[m] - f.values[n]) * (g.values[m] - g.values[n]);
                }
            }
        }
        s
    }))
}

pub fn energy(grid: &Grid, f: &Field) -> Result<f64> {
    energy_inner(grid, f, f)
}

/// ∫ ∂f/∂ν over one boundary class, with ν the outward normal of Ω on ∂Ω
/// and the outward normal of the inclusion on ∂D1, ∂D2.
pub fn boundary_flux(grid: &Grid, field: &Field, class: BoundaryClass) -> Result<f64> {
    weighted_flux(grid, field, class, |_| 1.0)
}

/// ∫ φ ∂f/∂ν over one boundary class, φ evaluated at the cut points.
pub fn weighted_flux<P>(grid: &Grid, field: &Field, class: BoundaryClass, phi: P) -> Result<f64>
where
    P: Fn(usize) -> f64 + Sync + Send,
{
    field.check(grid)?;
    if !grid.has_class(class) {
        return Err(Error::MissingBoundary(class));
    }
    // Σ w (f_b - f_i) is the flux along the outward normal of Ω̃, which is
    // the inward normal of an inclusion.
    let sign = if class == BoundaryClass::Omega { 1.0 } else { -1.0 };
    let s = par::chunked_sum(grid.cuts.len(), |range| {
        let mut s = 0.0;
        for c in range {
            let cut = &grid.cuts[c];
            if cut.class != class {
                continue;
            }
            let n = cut.node as usize;
            let w = grid.arms[n][cut.dir as usize].weight;
            s += w * (field.trace[c] - field.values[n]) * phi(c);
        }
        s
    });
    Ok(sign * s)
}

/// Gradient magnitude estimate at each active node: unequal-arm central
/// differences everywhere, and on gap-patch nodes also the four one-sided
/// combinations, keeping the largest.
pub fn gradient_magnitude(grid: &Grid, field: &Field) -> Result<Vec<f64>> {
    field.check(grid)?;
    Ok(par::map_indexed(grid.len(), |n| {
        let v = field.values[n];
        let arm = |d: usize| (field.across(grid, n, d), grid.arms[n][d].length);
        let (e, w, no, so) = (arm(0), arm(1), arm(2), arm(3));
        let gx = (e.0 - w.0) / (e.1 + w.1);
        let gy = (no.0 - so.0) / (no.1 + so.1);
        let mut best = gx.hypot(gy);
        if grid.patch[n].is_some() {
            for x in [(e.0 - v) / e.1, (v - w.0) / w.1] {
                for y in [(no.0 - v) / no.1, (v - so.0) / so.1] {
                    best = best.max(x.hypot(y));
                }
            }
        }
        best
    }))
}

/// Largest gradient estimate over active nodes away from declared corners,
/// with the node where it occurs.
pub fn sup_gradient(grid: &Grid, field: &Field) -> Result<(f64, Option<usize>)> {
    let g = gradient_magnitude(grid, field)?;
    let mut best = (0.0, None);
    for (n, &v) in g.iter().enumerate() {
        if !grid.near_corner[n] && v > best.0 {
            best = (v, Some(n));
        }
    }
    Ok(best)
}
