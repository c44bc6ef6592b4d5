//! ε-sweeps, exponent fits, the rate checks, and the search for boundary
//! data with Q_ε bounded away from zero.

mod fit;
mod phi;
mod search;
mod sweep;
mod theorems;

pub use fit::{fit_exponent, fit_points, FitModel, FitResult};
pub use phi::{periodic_interp, BuiltinPhi, PhiSpec};
pub use search::{find_boundary_data, BoundarySearch, BINS};
pub use sweep::{
    check_eps_list, predicted_sup, resolve_phi, sweep, HRule, Quantity, SweepOptions, SweepRow, SweepTable,
};
pub use theorems::{
    dirichlet_checks, structural_checks, verify_theorems, NamedCheck, TheoremReport, Window, EXPONENT_TOL,
};
