//! Numerical lab for the perfect conductivity problem: the potential between
//! two nearly touching perfect conductors, its capacity functionals, and the
//! blow-up rate of its gradient as the gap closes.
//!
//! Modules:
//! - [`geometry`]: configurations, gap patches, vanishing orders, presets.
//! - [`capacity`]: gap integrals, their radial reduction and regime checks.
//! - [`pde`]: cut-cell grids, Dirichlet solves and all scalar functionals.
//! - [`analysis`]: epsilon sweeps, exponent fits, boundary-data search.
//! - [`config`]: the JSON experiment configuration used by the CLI.
//! - [`acceptance`]: the built-in acceptance suite.

// NaN-rejecting checks read best as `!(x > 0.0)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod analysis;
pub mod capacity;
pub mod config;
pub mod error;
pub mod geometry;
pub mod par;
pub mod pde;

pub use error::{Error, Result};
