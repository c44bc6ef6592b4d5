use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::phi::PhiSpec;
use super::search::{find_boundary_data, BoundarySearch};
use crate::capacity::{gap_integral, GapIntegralSpec, Regime, DEFAULT_TOL};
use crate::geometry::{config_gamma, ConfigDocument, Configuration};
use crate::par;
use crate::pde::{build_grid, Fault, FunctionalsReport, Grading, GridSpec, Session, SolverOptions};
use crate::{Error, Result};

/// Spacing rule of a sweep: fine spacing ε/divisor in the gap bands,
/// optionally graded up to `h_max` elsewhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HRule {
    pub divisor: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grading: Option<Grading>,
}

impl Default for HRule {
    fn default() -> Self {
        HRule { divisor: 8.0, grading: Some(Grading { ratio: 1.08, h_max: 0.04 }) }
    }
}

impl HRule {
    pub fn h(&self, epsilon: f64) -> f64 {
        epsilon / self.divisor
    }

    pub fn spec(&self, epsilon: f64) -> GridSpec {
        GridSpec { h: self.h(epsilon), grading: self.grading }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.divisor >= 8.0) {
            return Err(Error::Resolution(format!("h = eps/{} is coarser than eps/8", self.divisor)));
        }
        Ok(())
    }
}

/// A column of the sweep table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    SupGradU,
    EnergyV1,
    /// |C1 - C2|.
    CDiff,
    /// |Q_ε|.
    QEps,
    EnergyW,
    /// -∫_{∂Ω} ∂v1/∂ν.
    NegFluxV1,
}

impl Quantity {
    pub fn of(self, r: &FunctionalsReport) -> f64 {
        match self {
            Quantity::SupGradU => r.sup_grad_u,
            Quantity::EnergyV1 => r.energy_v1,
            Quantity::CDiff => r.c_diff(),
            Quantity::QEps => r.q_eps.abs(),
            Quantity::EnergyW => r.energy_w,
            Quantity::NegFluxV1 => -r.flux_omega_v1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub report: Option<FunctionalsReport>,
    /// I(ε) of each patch.
    pub gap_integrals: Vec<f64>,
    /// Predicted size of sup|∇u|: ε^{-γ}, 1/(ε log(1/ε)) or 1/ε.
    pub predicted_sup: f64,
    /// Predicted size of energy(v1): ε^{γ-1}, log(1/ε) or 1.
    pub predicted_energy: f64,
    pub flags: Vec<String>,
}

impl SweepRow {
    pub fn is_flagged(&self) -> bool {
        self.report.is_none() || !self.flags.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub base: ConfigDocument,
    pub h_rule: HRule,
    pub phi_id: String,
    /// The boundary data actually used in every row.
    pub phi: PhiSpec,
    pub search: Option<BoundarySearch>,
    pub gamma: f64,
    pub rows: Vec<SweepRow>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepOptions {
    pub solver: SolverOptions,
    /// Seed of the random trace pool in the boundary-data search.
    pub seed: u64,
    /// Relative tolerance of the per-patch gap integrals.
    #[serde(default = "default_quad_tol")]
    pub quad_tol: f64,
    #[serde(default)]
    pub fault: Fault,
}

fn default_quad_tol() -> f64 {
    DEFAULT_TOL
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            solver: SolverOptions::default(),
            seed: crate::capacity::DEFAULT_SEED,
            quad_tol: DEFAULT_TOL,
            fault: Fault::None,
        }
    }
}

/// Predicted sup|∇u| size for γ.
pub fn predicted_sup(gamma: f64, epsilon: f64) -> f64 {
    match Regime::of(gamma) {
        Regime::GammaLt1 => epsilon.powf(-gamma),
        Regime::GammaEq1 => 1.0 / (epsilon * (1.0 / epsilon).ln()),
        Regime::GammaGt1 => 1.0 / epsilon,
    }
}

/// Checks an ε list: at least four distinct positive values spanning a
/// decade. Returns it sorted decreasing.
pub fn check_eps_list(eps_list: &[f64]) -> Result<Vec<f64>> {
    if eps_list.len() < 4 {
        return Err(Error::InsufficientRows(eps_list.len()));
    }
    if eps_list.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidInput("epsilons must be positive".into()));
    }
    let mut v = eps_list.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    if v.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("epsilons must be distinct".into()));
    }
    if v[0] / v[v.len() - 1] < 10.0 * (1.0 - 1e-12) {
        return Err(Error::InvalidInput("epsilons must span at least one decade".into()));
    }
    Ok(v)
}

/// Resolves `Search` boundary data at `epsilon`; other specs pass through.
pub fn resolve_phi(
    base: &ConfigDocument,
    epsilon: f64,
    phi: &PhiSpec,
    h_rule: &HRule,
    opts: &SweepOptions,
) -> Result<(PhiSpec, Option<BoundarySearch>)> {
    match phi {
        PhiSpec::Search { basis_size } => {
            let config = Configuration::from_document(&ConfigDocument { epsilon, ..base.clone() })?;
            let grid = build_grid(&config, &h_rule.spec(epsilon))?;
            let session = Session::new(&config, &grid, opts.solver)?;
            let found = find_boundary_data(&session, *basis_size, opts.seed)?;
            Ok((found.phi.clone(), Some(found)))
        }
        other => Ok((other.clone(), None)),
    }
}

fn run_row(config: &Configuration, phi: &PhiSpec, h_rule: &HRule, opts: &SweepOptions) -> Result<FunctionalsReport> {
    let grid = build_grid(config, &h_rule.spec(config.epsilon))?;
    let session = Session::new(config, &grid, opts.solver)?;
    Ok(session.report_with(&phi.boundary_value(config)?, opts.fault)?.0)
}

/// Runs the functionals at every ε. Rows are independent and may run in
/// parallel; a failing row is flagged and the sweep goes on.
pub fn sweep(
    base: &ConfigDocument,
    eps_list: &[f64],
    phi: &PhiSpec,
    h_rule: &HRule,
    opts: &SweepOptions,
) -> Result<SweepTable> {
    let eps = check_eps_list(eps_list)?;
    h_rule.validate()?;
    phi.validate()?;
    let first = Configuration::from_document(&ConfigDocument { epsilon: eps[0], ..base.clone() })?;
    let gamma = config_gamma(&first)?;
    let (phi_used, search) = resolve_phi(base, eps[0], phi, h_rule, opts)?;

    let rows = par::map_indexed(eps.len(), |k| {
        let e = eps[k];
        let mut row = SweepRow {
            epsilon: e,
            report: None,
            gap_integrals: Vec::new(),
            predicted_sup: predicted_sup(gamma, e),
            predicted_energy: Regime::of(gamma).predicted(gamma, e),
            flags: Vec::new(),
        };
        let config = match Configuration::from_document(&ConfigDocument { epsilon: e, ..base.clone() }) {
            Ok(c) => c,
            Err(err) => {
                row.flags.push(format!("error: {err}"));
                return row;
            }
        };
        for p in &config.patches {
            let spec = GapIntegralSpec { orders: p.orders.clone(), r: p.half_width, n: p.dim(), epsilon: e };
            match gap_integral(&spec, opts.quad_tol) {
                Ok(v) => row.gap_integrals.push(v),
                Err(err) => {
                    row.gap_integrals.push(f64::NAN);
                    row.flags.push(format!("error: {err}"));
                }
            }
        }
        match run_row(&config, &phi_used, h_rule, opts) {
            Ok(r) => {
                row.flags.extend(r.failed_checks().into_iter().map(str::to_owned));
                row.report = Some(r);
            }
            Err(err) => row.flags.push(format!("error: {err}")),
        }
        row
    });
    Ok(SweepTable { base: base.clone(), h_rule: h_rule.clone(), phi_id: phi.id(), phi: phi_used, search, gamma, rows })
}

impl SweepTable {
    pub fn unflagged(&self) -> impl Iterator<Item = (&SweepRow, &FunctionalsReport)> {
        self.rows.iter().filter(|r| !r.is_flagged()).filter_map(|r| r.report.as_ref().map(|rep| (r, rep)))
    }

    /// (ε, quantity) over the unflagged rows.
    pub fn series(&self, q: Quantity) -> (Vec<f64>, Vec<f64>) {
        self.unflagged().map(|(r, rep)| (r.epsilon, q.of(rep))).unzip()
    }

    pub fn patch_count(&self) -> usize {
        self.rows.iter().map(|r| r.gap_integrals.len()).max().unwrap_or(0)
    }

    pub const CSV_COLUMNS: [&'static str; 13] = [
        "epsilon",
        "sup_grad_u",
        "energy_v1",
        "C1",
        "C2",
        "Q_eps",
        "a11",
        "a12",
        "a22",
        "b1",
        "b2",
        "flux_v1",
        "flux_v2",
    ];

    /// Fixed column order: the thirteen [`Self::CSV_COLUMNS`], then
    /// `I_patch_0..k`, then `flags` (semicolon separated). Floats use the
    /// shortest round-trip representation.
    pub fn to_csv(&self) -> String {
        let k = self.patch_count();
        let mut out = Self::CSV_COLUMNS.join(",");
        for i in 0..k {
            let _ = write!(out, ",I_patch_{i}");
        }
        out.push_str(",flags\n");
        for row in &self.rows {
            let _ = write!(out, "{:e}", row.epsilon);
            match &row.report {
                Some(r) => {
                    for v in [
                        r.sup_grad_u,
                        r.energy_v1,
                        r.c1,
                        r.c2,
                        r.q_eps,
                        r.a11,
                        r.a12,
                        r.a22,
                        r.b1,
                        r.b2,
                        r.flux_omega_v1,
                        r.flux_omega_v2,
                    ] {
                        let _ = write!(out, ",{v:e}");
                    }
                }
                None => out.push_str(&",".repeat(12)),
            }
            for i in 0..k {
                match row.gap_integrals.get(i) {
                    Some(v) => {
                        let _ = write!(out, ",{v:e}");
                    }
                    None => out.push(','),
                }
            }
            let flags = row.flags.join(";").replace([',', '\n'], " ");
            let _ = writeln!(out, ",{flags}");
        }
        out
    }
}
