//! Cut-cell discretization of Ω̃ = Ω \ (D1 ∪ D2), the Dirichlet solves for
//! v1, v2, v3, and every scalar functional built from them.

mod axis;
mod comparison;
pub mod export;
mod field;
mod functionals;
mod grid;
mod solver;

pub use comparison::{comparison_field, gap_energy_lower, gap_profile, smoothstep};
pub use field::{
    boundary_flux, energy, energy_inner, energy_inner_in, gradient_magnitude, sup_gradient, weighted_flux, Field,
};
pub use functionals::{functionals, Applicable, Fault, FunctionalsReport, OmegaCut, Session};
pub use grid::{build_grid, Arm, BoundaryClass, Cut, Grading, Grid, GridSpec, NodeClass, DIRS};
pub use solver::{
    solve_dirichlet, BoundaryData, BoundaryValue, Cholesky, DirichletSolver, Jacobi, Operator, Preconditioner,
    PreconditionerKind, SolveStats, SolverOptions, TraceFn, AUTO_CHOLESKY_NODES,
};
