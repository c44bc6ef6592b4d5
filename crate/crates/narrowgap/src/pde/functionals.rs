use serde::{Deserialize, Serialize};

use super::comparison::{comparison_field, gap_energy_lower};
use super::field::{boundary_flux, energy, energy_inner, energy_inner_in, sup_gradient, weighted_flux, Field};
use super::grid::{BoundaryClass, Grid};
use super::solver::{BoundaryData, BoundaryValue, DirichletSolver, SolveStats, SolverOptions};
use crate::geometry::{Configuration, Point};
use crate::{Error, Result};

/// Deliberate corruptions used to test that the invariant checks bite.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    #[default]
    None,
    /// Negate a12 (and a21) before solving for C1, C2.
    FlipA12,
}

/// Outcome of a check that only applies to some inputs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Applicable<T> {
    Value(T),
    NotApplicable,
}

impl<T: Copy> Applicable<T> {
    pub fn value(&self) -> Option<T> {
        match self {
            Applicable::Value(v) => Some(*v),
            Applicable::NotApplicable => None,
        }
    }
}

/// Every scalar functional of one solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalsReport {
    pub epsilon: f64,
    pub nodes: usize,
    pub h: f64,
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
    pub b1: f64,
    pub b2: f64,
    pub det: f64,
    pub c1: f64,
    pub c2: f64,
    /// Q_ε from boundary fluxes: Φ1·F2 - Φ2·F1.
    pub q_eps: f64,
    /// Q_ε from the identity (C1 - C2)(a11 a22 - a12²).
    pub q_identity: f64,
    /// Size of Q_ε's terms with all cancellation removed:
    /// ∫|φ ∂v1/∂ν|·|F2| + ∫|φ ∂v2/∂ν|·|F1|.
    pub q_scale: f64,
    pub energy_v1: f64,
    /// Part of energy(v1) inside the gap patches.
    pub energy_v1_gap: f64,
    /// Energy of the patched comparison field W.
    pub energy_w: f64,
    /// ∫ dx'/(g - f) per patch.
    pub gap_lower: Vec<f64>,
    pub sup_grad_u: f64,
    pub sup_at: Option<Point>,
    /// ∫_{∂Ω} ∂v_i/∂ν.
    pub flux_omega_v1: f64,
    pub flux_omega_v2: f64,
    /// ∫_{∂D_i} ∂u/∂ν, zero for a perfect conductor; diagnostic only.
    pub flux_d1_u: f64,
    pub flux_d2_u: f64,
    /// |-flux_omega_v1 - (a11 + a21)| / a11.
    pub flux_identity_gap: f64,
    pub stats: [SolveStats; 3],
    pub fault: Fault,
}

impl FunctionalsReport {
    pub fn c_diff(&self) -> f64 {
        (self.c1 - self.c2).abs()
    }

    /// sup|∇u| against the mean-value lower bound |C1 - C2|/ε.
    pub fn lemma21_ratio(&self) -> f64 {
        self.sup_grad_u * self.epsilon / self.c_diff()
    }

    /// |C1 - C2|·energy(v1)/|Q_ε|; not applicable when Q_ε vanishes to
    /// solver noise.
    pub fn lemma22_ratio(&self) -> Applicable<f64> {
        if self.q_eps.abs() <= 1e-9 * self.q_scale || self.q_eps == 0.0 {
            Applicable::NotApplicable
        } else {
            Applicable::Value(self.c_diff() * self.energy_v1 / self.q_eps.abs())
        }
    }

    /// (a11 a22 - a12²)/a11.
    pub fn det_ratio(&self) -> f64 {
        self.det / self.a11
    }

    /// Relative disagreement of the two Q_ε routes.
    pub fn q_route_gap(&self) -> f64 {
        if self.q_scale == 0.0 {
            (self.q_eps - self.q_identity).abs()
        } else {
            (self.q_eps - self.q_identity).abs() / self.q_scale
        }
    }

    /// Per-solve structural checks, by name.
    pub fn checks(&self) -> Vec<(&'static str, bool)> {
        let lemma21 = self.c_diff() / self.epsilon <= self.sup_grad_u * (1.0 + 1e-9) + 1e-12;
        vec![
            ("a11 > 0", self.a11 > 0.0),
            ("a22 > 0", self.a22 > 0.0),
            ("a12 <= 0", self.a12 <= 0.0),
            ("a12 = a21", (self.a12 - self.a21).abs() <= 1e-8 * self.a11),
            ("a11 + a21 > 0", self.a11 + self.a21 > 0.0),
            ("a22 + a12 > 0", self.a22 + self.a12 > 0.0),
            ("det > 0", self.det > 0.0),
            ("flux identity", self.flux_identity_gap <= 0.05),
            ("Q routes agree", self.q_route_gap() <= 1e-6),
            ("-flux_omega_v1 > 0", -self.flux_omega_v1 > 0.0),
            ("-flux_omega_v2 > 0", -self.flux_omega_v2 > 0.0),
            ("|C1-C2|/eps <= sup|grad u|", lemma21),
            ("energy(v1) <= energy(W)", self.energy_v1 <= self.energy_w * (1.0 + 1e-9)),
            ("energy(v1) >= 0.85 gap lower", self.gap_lower.iter().all(|g| self.energy_v1 >= 0.85 * g)),
        ]
    }

    pub fn failed_checks(&self) -> Vec<&'static str> {
        self.checks().into_iter().filter(|c| !c.1).map(|c| c.0).collect()
    }
}

/// v1 and v2 solved once on a grid; everything that depends on φ is cheap
/// afterwards.
pub struct Session<'a> {
    pub config: &'a Configuration,
    pub solver: DirichletSolver<'a>,
    pub v1: Field,
    pub v2: Field,
    pub stats: [SolveStats; 2],
    pub flux_omega_v1: f64,
    pub flux_omega_v2: f64,
}

impl<'a> Session<'a> {
    pub fn new(config: &'a Configuration, grid: &'a Grid, opts: SolverOptions) -> Result<Session<'a>> {
        if grid.epsilon != config.epsilon {
            return Err(Error::InvalidInput(format!(
                "grid built for epsilon {} used with epsilon {}",
                grid.epsilon, config.epsilon
            )));
        }
        for class in BoundaryClass::ALL {
            if !grid.has_class(class) {
                return Err(Error::MissingBoundary(class));
            }
        }
        let solver = DirichletSolver::new(grid, opts)?;
        let (v1, s1) = solver.solve(&BoundaryData::constants(0.0, 1.0, 0.0))?;
        let (v2, s2) = solver.solve(&BoundaryData::constants(0.0, 0.0, 1.0))?;
        let flux_omega_v1 = boundary_flux(grid, &v1, BoundaryClass::Omega)?;
        let flux_omega_v2 = boundary_flux(grid, &v2, BoundaryClass::Omega)?;
        Ok(Session { config, solver, v1, v2, stats: [s1, s2], flux_omega_v1, flux_omega_v2 })
    }

    pub fn grid(&self) -> &'a Grid {
        self.solver.grid()
    }

    /// φ at every cut point (zero on the inclusions).
    pub fn phi_trace(&self, phi: &BoundaryValue) -> Vec<f64> {
        let g = self.grid();
        g.cuts.iter().map(|c| if c.class == BoundaryClass::Omega { phi.at(c.point) } else { 0.0 }).collect()
    }

    /// (∫_{∂Ω} φ ∂v1/∂ν, ∫_{∂Ω} φ ∂v2/∂ν).
    pub fn phi_fluxes(&self, trace: &[f64]) -> Result<(f64, f64)> {
        let g = self.grid();
        Ok((
            weighted_flux(g, &self.v1, BoundaryClass::Omega, |c| trace[c])?,
            weighted_flux(g, &self.v2, BoundaryClass::Omega, |c| trace[c])?,
        ))
    }

    /// Q_ε(φ) from boundary fluxes, without solving for v3.
    pub fn q_of(&self, phi: &BoundaryValue) -> Result<f64> {
        let (p1, p2) = self.phi_fluxes(&self.phi_trace(phi))?;
        Ok(p1 * self.flux_omega_v2 - p2 * self.flux_omega_v1)
    }

    /// Per-cut outward flux densities of v1 and v2 on ∂Ω, with cut points
    /// and arm weights.
    pub fn omega_flux_terms(&self) -> Vec<OmegaCut> {
        let g = self.grid();
        g.cuts
            .iter()
            .enumerate()
            .filter(|(_, c)| c.class == BoundaryClass::Omega)
            .map(|(k, c)| {
                let n = c.node as usize;
                let w = g.arms[n][c.dir as usize].weight;
                OmegaCut {
                    cut: k,
                    point: c.point,
                    weight: w,
                    flux_v1: w * (self.v1.trace[k] - self.v1.values[n]),
                    flux_v2: w * (self.v2.trace[k] - self.v2.values[n]),
                }
            })
            .collect()
    }

    pub fn report(&self, phi: &BoundaryValue) -> Result<FunctionalsReport> {
        self.report_with(phi, Fault::None).map(|(r, _)| r)
    }

    /// Full report plus the assembled potential u.
    pub fn report_with(&self, phi: &BoundaryValue, fault: Fault) -> Result<(FunctionalsReport, Field)> {
        let g = self.grid();
        let trace = self.phi_trace(phi);
        let (v3, s3) = self.solver.solve_trace(trace.clone())?;
        let (v1, v2) = (&self.v1, &self.v2);
        let a11 = energy(g, v1)?;
        let a22 = energy(g, v2)?;
        let mut a12 = energy_inner(g, v1, v2)?;
        let mut a21 = energy_inner(g, v2, v1)?;
        if fault == Fault::FlipA12 {
            a12 = -a12;
            a21 = -a21;
        }
        let b1 = energy_inner(g, v1, &v3)?;
        let b2 = energy_inner(g, v2, &v3)?;
        let det = a11 * a22 - a12 * a21;
        if !(det.abs() > 1e-14 * a11.abs()) {
            return Err(Error::Singular { det, a11 });
        }
        let c1 = (-b1 * a22 + a12 * b2) / det;
        let c2 = (-a11 * b2 + a21 * b1) / det;
        let (p1, p2) = self.phi_fluxes(&trace)?;
        let (f1, f2) = (self.flux_omega_v1, self.flux_omega_v2);
        let q_eps = p1 * f2 - p2 * f1;
        let q_identity = (c1 - c2) * det;
        let abs_trace: Vec<f64> = trace.iter().map(|t| t.abs()).collect();
        let abs_flux = |v: &Field| {
            g.cuts
                .iter()
                .enumerate()
                .filter(|(_, c)| c.class == BoundaryClass::Omega)
                .map(|(k, c)| {
                    let n = c.node as usize;
                    (g.arms[n][c.dir as usize].weight * (v.trace[k] - v.values[n]) * abs_trace[k]).abs()
                })
                .sum::<f64>()
        };
        let q_scale = abs_flux(v1) * f2.abs() + abs_flux(v2) * f1.abs();

        let u = Field::combine(&[(c1, v1), (c2, v2), (1.0, &v3)])?;
        let (sup_grad_u, at) = sup_gradient(g, &u)?;
        let w = comparison_field(self.config, g, v1)?;
        let energy_w = energy(g, &w)?;
        let energy_v1_gap = energy_inner_in(g, v1, v1, |n| g.patch[n].is_some())?;
        let gap_lower =
            (0..self.config.patches.len()).map(|i| gap_energy_lower(self.config, i)).collect::<Result<Vec<f64>>>()?;
        let report = FunctionalsReport {
            epsilon: self.config.epsilon,
            nodes: g.len(),
            h: g.h,
            a11,
            a12,
            a21,
            a22,
            b1,
            b2,
            det,
            c1,
            c2,
            q_eps,
            q_identity,
            q_scale,
            energy_v1: a11,
            energy_v1_gap,
            energy_w,
            gap_lower,
            sup_grad_u,
            sup_at: at.map(|n| g.point(n)),
            flux_omega_v1: f1,
            flux_omega_v2: f2,
            flux_d1_u: boundary_flux(g, &u, BoundaryClass::D1)?,
            flux_d2_u: boundary_flux(g, &u, BoundaryClass::D2)?,
            flux_identity_gap: (-f1 - (a11 + a21)).abs() / a11,
            stats: [self.stats[0], self.stats[1], s3],
            fault,
        };
        Ok((report, u))
    }
}

/// One cut on ∂Ω with the outward flux contributions of v1 and v2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OmegaCut {
    pub cut: usize,
    pub point: Point,
    pub weight: f64,
    pub flux_v1: f64,
    pub flux_v2: f64,
}

/// Solves v1, v2, v3 on `grid` and returns the full report.
pub fn functionals(config: &Configuration, grid: &Grid, phi: &BoundaryValue, tol: f64) -> Result<FunctionalsReport> {
    let session = Session::new(config, grid, SolverOptions { tol, ..Default::default() })?;
    session.report(phi)
}
