//! The JSON experiment configuration read by the command-line front end.
//!
//! One self-describing document drives every command:
//!
//! ```json
//! {
//!   "preset": "two_disks_2d",
//!   "params": { "radius": 1.0 },
//!   "eps_list": [0.1, 0.05, 0.025, 0.0125],
//!   "h_rule": { "divisor": 8.0, "grading": { "ratio": 1.08, "h_max": 0.04 } },
//!   "phi": { "kind": "search", "basis_size": 8 },
//!   "output_dir": "out",
//!   "tolerances": { "solver": 1e-10, "quadrature": 1e-8, "exponent": 0.1 },
//!   "seed": 1234
//! }
//! ```
//!
//! Everything but `preset` and `eps_list` has a default. Unknown keys are
//! rejected at every level.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{HRule, PhiSpec, SweepOptions, EXPONENT_TOL};
use crate::capacity::{DEFAULT_CLAIM_FACTOR, DEFAULT_SEED, DEFAULT_TOL};
use crate::geometry::{ConfigDocument, Configuration, Overrides, Params, PresetName, VanishingOrders};
use crate::pde::{PreconditionerKind, SolverOptions};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub preset: PresetName,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub overrides: Overrides,
    pub eps_list: Vec<f64>,
    #[serde(default)]
    pub h_rule: HRule,
    #[serde(default = "default_phi")]
    pub phi: PhiSpec,
    /// Where reports, tables and dumps go. Without it results are printed
    /// on standard output and no dumps are written.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub preconditioner: PreconditionerKind,
    #[serde(default)]
    pub dumps: Dumps,
    /// Gap-integral studies for the `integrals` command. Empty means one
    /// study per patch of the preset over `eps_list`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub integrals: Vec<IntegralStudy>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative residual of the conjugate gradient solves.
    #[serde(default = "default_solver_tol")]
    pub solver: f64,
    /// Relative tolerance of the adaptive quadrature.
    #[serde(default = "default_quad_tol")]
    pub quadrature: f64,
    /// Allowed distance between fitted and predicted exponents.
    #[serde(default = "default_exponent_tol")]
    pub exponent: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { solver: default_solver_tol(), quadrature: default_quad_tol(), exponent: default_exponent_tol() }
    }
}

/// Field dumps written by `solve` next to the report.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dumps {
    #[serde(default)]
    pub csv: bool,
    #[serde(default)]
    pub binary: bool,
    /// |∇u| heat map.
    #[serde(default)]
    pub svg: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegralStudy {
    pub orders: VanishingOrders,
    pub n: usize,
    pub r: f64,
    pub eps_list: Vec<f64>,
    /// Allowed ratio window of I(ε) over its predicted size.
    #[serde(default = "default_factor")]
    pub factor: f64,
}

fn default_phi() -> PhiSpec {
    PhiSpec::Search { basis_size: 8 }
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn default_solver_tol() -> f64 {
    SolverOptions::default().tol
}
fn default_quad_tol() -> f64 {
    DEFAULT_TOL
}
fn default_exponent_tol() -> f64 {
    EXPONENT_TOL
}
fn default_factor() -> f64 {
    DEFAULT_CLAIM_FACTOR
}

impl ExperimentConfig {
    /// A config with defaults for everything optional.
    pub fn new(preset: PresetName, eps_list: Vec<f64>) -> ExperimentConfig {
        ExperimentConfig {
            preset,
            params: Params::new(),
            overrides: Overrides::default(),
            eps_list,
            h_rule: HRule::default(),
            phi: default_phi(),
            output_dir: None,
            tolerances: Tolerances::default(),
            seed: DEFAULT_SEED,
            preconditioner: PreconditionerKind::default(),
            dumps: Dumps::default(),
            integrals: Vec::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<ExperimentConfig> {
        let c: ExperimentConfig = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Checks the parts that do not need a grid.
    pub fn validate(&self) -> Result<()> {
        if self.eps_list.is_empty() {
            return Err(Error::InvalidInput("eps_list is empty".into()));
        }
        let t = &self.tolerances;
        for (name, v) in [("solver", t.solver), ("quadrature", t.quadrature), ("exponent", t.exponent)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("tolerance {name} = {v} must be positive")));
            }
        }
        self.phi.validate()?;
        for s in &self.integrals {
            if !(s.factor > 1.0) {
                return Err(Error::InvalidInput(format!("integral factor {} must exceed 1", s.factor)));
            }
        }
        Ok(())
    }

    pub fn document(&self, epsilon: f64) -> ConfigDocument {
        ConfigDocument { preset: self.preset, epsilon, params: self.params.clone(), overrides: self.overrides.clone() }
    }

    /// The single ε of a `solve` run.
    pub fn single_epsilon(&self) -> Result<f64> {
        match self.eps_list.as_slice() {
            [e] => Ok(*e),
            other => Err(Error::InvalidInput(format!("solve needs exactly one epsilon, got {}", other.len()))),
        }
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions { tol: self.tolerances.solver, preconditioner: self.preconditioner }
    }

    pub fn sweep_options(&self) -> SweepOptions {
        SweepOptions {
            solver: self.solver_options(),
            seed: self.seed,
            quad_tol: self.tolerances.quadrature,
            ..SweepOptions::default()
        }
    }

    /// The configured studies, or one per patch of the preset at the
    /// largest ε when none are given.
    pub fn integral_studies(&self) -> Result<Vec<IntegralStudy>> {
        if !self.integrals.is_empty() {
            return Ok(self.integrals.clone());
        }
        let top = self.eps_list.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let config = Configuration::from_document(&self.document(top))?;
        if config.patches.is_empty() {
            return Err(Error::InvalidInput(format!("{} has no gap patches", self.preset)));
        }
        Ok(config
            .patches
            .iter()
            .map(|p| IntegralStudy {
                orders: p.orders.clone(),
                n: p.dim(),
                r: p.half_width,
                eps_list: self.eps_list.clone(),
                factor: DEFAULT_CLAIM_FACTOR,
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let c = ExperimentConfig::from_json(r#"{"preset": "flat_gap_2d", "eps_list": [0.1]}"#).unwrap();
        assert_eq!(c, ExperimentConfig::new(PresetName::FlatGap2d, vec![0.1]));
        assert_eq!(c.single_epsilon().unwrap(), 0.1);
    }

    #[test]
    fn unknown_keys_rejected() {
        for text in [
            r#"{"preset": "flat_gap_2d", "eps_list": [0.1], "colour": 1}"#,
            r#"{"preset": "flat_gap_2d", "eps_list": [0.1], "tolerances": {"solvr": 1e-9}}"#,
            r#"{"preset": "flat_gap_2d", "eps_list": [0.1], "phi": {"kind": "trig", "harmonics": [], "x": 1}}"#,
        ] {
            assert!(ExperimentConfig::from_json(text).is_err(), "{text}");
        }
    }

    #[test]
    fn parse_error_has_location() {
        let err =
            ExperimentConfig::from_json("{\n  \"preset\": \"flat_gap_2d\",\n  \"eps_list\": [0.1,]\n}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    fn arb_phi() -> impl Strategy<Value = PhiSpec> {
        prop_oneof![
            (3usize..20).prop_map(|basis_size| PhiSpec::Search { basis_size }),
            (
                any::<f64>().prop_filter("finite", |v| v.is_finite()),
                prop::collection::vec([-5.0..5.0f64, -5.0..5.0f64], 0..5)
            )
                .prop_map(|(constant, harmonics)| PhiSpec::Trig { constant, harmonics }),
        ]
    }

    proptest! {
        #[test]
        fn round_trip_is_lossless(
            eps in prop::collection::vec(1e-6..0.5f64, 1..8),
            seed in any::<u64>(),
            divisor in 8.0..64.0f64,
            solver in 1e-14..1e-6f64,
            phi in arb_phi(),
            radius in 0.1..3.0f64,
            dir in prop::option::of("[a-z]{1,8}"),
            csv in any::<bool>(),
        ) {
            let mut c = ExperimentConfig::new(PresetName::TwoDisks2d, eps);
            c.seed = seed;
            c.h_rule.divisor = divisor;
            c.tolerances.solver = solver;
            c.phi = phi;
            c.params.insert("radius".into(), radius.into());
            c.output_dir = dir.map(PathBuf::from);
            c.dumps.csv = csv;
            c.integrals.push(IntegralStudy {
                orders: VanishingOrders::new(vec![crate::geometry::Order::Finite(1.0 + radius)]).unwrap(),
                n: 2,
                r: radius,
                eps_list: vec![1e-8, radius * 1e-3],
                factor: 5.0,
            });
            let back: ExperimentConfig = serde_json::from_str(&c.to_json()).unwrap();
            prop_assert_eq!(&back, &c);
            prop_assert_eq!(back.to_json(), c.to_json());
        }
    }
}
