use serde::{Deserialize, Serialize};

use super::fit::{fit_exponent, fit_points, FitModel, FitResult};
use super::sweep::{Quantity, SweepTable};
use crate::capacity::Regime;
use crate::Result;

/// Default exponent tolerance.
pub const EXPONENT_TOL: f64 = 0.1;

/// Spread of a positive quantity over the rows.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Window> {
        let mut w: Option<Window> = None;
        for v in values {
            let cur = w.get_or_insert(Window { lo: v, hi: v });
            cur.lo = cur.lo.min(v);
            cur.hi = cur.hi.max(v);
        }
        w
    }

    /// hi/lo, infinite unless the window is strictly positive.
    pub fn ratio(&self) -> f64 {
        if self.lo > 0.0 && self.hi.is_finite() {
            self.hi / self.lo
        } else {
            f64::INFINITY
        }
    }

    pub fn positive(&self) -> bool {
        self.lo > 0.0 && self.hi.is_finite()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub gamma: f64,
    pub regime: Regime,
    pub tol: f64,
    /// Log-log fit of sup|∇u| (POWER, or POWER_LOG at γ = 1).
    pub sup_fit: Option<FitResult>,
    /// sup|∇u| over its predicted size.
    pub sup_constants: Option<Window>,
    pub exponent_ok: bool,
    /// Change of the fitted exponent when the largest ε is dropped.
    pub drop_largest_shift: Option<f64>,
    pub energy_fit: Option<FitResult>,
    /// energy(v1) over its predicted size.
    pub energy_constants: Option<Window>,
    pub pass: bool,
    pub notes: Vec<String>,
}

/// Checks the two-sided rate of sup|∇u| against γ: for γ ≠ 1 the constants
/// sup·ε^γ must stay in a positive window and the fitted exponent within
/// `tol` of -γ; for γ = 1 sup·ε·log(1/ε) must stay in a positive window.
pub fn verify_theorems(table: &SweepTable, gamma: f64, tol: f64) -> Result<TheoremReport> {
    let regime = Regime::of(gamma);
    let mut notes = Vec::new();
    let model = if regime == Regime::GammaEq1 { FitModel::PowerLog } else { FitModel::Power };
    let sup_fit = match fit_exponent(table, Quantity::SupGradU, model) {
        Ok(f) => Some(f),
        Err(e) => {
            notes.push(format!("sup fit: {e}"));
            None
        }
    };
    let sup_constants = Window::of(table.unflagged().map(|(r, rep)| rep.sup_grad_u / r.predicted_sup));
    let exponent_ok = match (&sup_fit, regime) {
        (Some(f), Regime::GammaEq1) => f.amplitude > 0.0,
        (Some(f), _) => (f.exponent + gamma).abs() <= tol,
        (None, _) => false,
    };
    let drop_largest_shift = {
        let (e, q) = table.series(Quantity::SupGradU);
        if e.len() > 4 && model == FitModel::Power {
            match (fit_points(&e, &q, model), fit_points(&e[1..], &q[1..], model)) {
                (Ok(a), Ok(b)) => Some((a.exponent - b.exponent).abs()),
                _ => None,
            }
        } else {
            None
        }
    };
    let energy_fit = fit_exponent(table, Quantity::EnergyV1, FitModel::Power).ok();
    let energy_constants = Window::of(table.unflagged().map(|(r, rep)| rep.energy_v1 / r.predicted_energy));
    let flagged = table.rows.iter().filter(|r| r.is_flagged()).count();
    if flagged > 0 {
        notes.push(format!("{flagged} flagged row(s) left out of the fits"));
    }
    let pass = exponent_ok && sup_constants.is_some_and(|w| w.positive());
    Ok(TheoremReport {
        gamma,
        regime,
        tol,
        sup_fit,
        sup_constants,
        exponent_ok,
        drop_largest_shift,
        energy_fit,
        energy_constants,
        pass,
        notes,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl NamedCheck {
    fn new(name: &str, pass: bool, detail: String) -> NamedCheck {
        NamedCheck { name: name.into(), pass, detail }
    }
}

/// Whether every value lies within ±50% of the median.
fn stable(values: &[f64]) -> bool {
    if values.is_empty() {
        return false;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v[v.len() / 2];
    m > 0.0 && v.iter().all(|x| (x / m - 1.0).abs() <= 0.5)
}

/// The structural inequalities over every row of a sweep: sign of a12,
/// determinant window, outer flux bounds, both sides of the gradient
/// sandwich and the |C1 - C2| sandwich window.
pub fn structural_checks(table: &SweepTable) -> Vec<NamedCheck> {
    let reports: Vec<_> = table.rows.iter().filter_map(|r| r.report.as_ref()).collect();
    let mut out = vec![NamedCheck::new(
        "all rows solved",
        reports.len() == table.rows.len(),
        format!("{}/{}", reports.len(), table.rows.len()),
    )];
    let all = |f: &dyn Fn(&crate::pde::FunctionalsReport) -> bool| !reports.is_empty() && reports.iter().all(|r| f(r));
    out.push(NamedCheck::new(
        "a12 <= 0",
        all(&|r| r.a12 <= 0.0),
        format!("max a12 = {:e}", reports.iter().map(|r| r.a12).fold(f64::NEG_INFINITY, f64::max)),
    ));
    let det = Window::of(reports.iter().map(|r| r.det_ratio()));
    out.push(NamedCheck::new(
        "det window C/c <= 10",
        det.is_some_and(|w| w.positive() && w.ratio() <= 10.0),
        format!("{det:?}"),
    ));
    for (name, vals) in [
        ("-flux(dOmega, v1) >= c > 0 stable", reports.iter().map(|r| -r.flux_omega_v1).collect::<Vec<_>>()),
        ("-flux(dOmega, v2) >= c > 0 stable", reports.iter().map(|r| -r.flux_omega_v2).collect::<Vec<_>>()),
    ] {
        let w = Window::of(vals.iter().copied());
        out.push(NamedCheck::new(name, w.is_some_and(|w| w.lo > 0.0) && stable(&vals), format!("{w:?}")));
    }
    out.push(NamedCheck::new(
        "|C1-C2|/eps <= sup|grad u|",
        all(&|r| r.c_diff() / r.epsilon <= r.sup_grad_u * (1.0 + 1e-9) + 1e-12),
        format!("{:?}", Window::of(reports.iter().map(|r| r.lemma21_ratio()))),
    ));
    let upper: Vec<f64> = reports.iter().map(|r| r.sup_grad_u / (r.c_diff() / r.epsilon + 1.0)).collect();
    out.push(NamedCheck::new(
        "sup|grad u| <= C(|C1-C2|/eps + 1), C stable",
        stable(&upper),
        format!("{:?}", Window::of(upper.iter().copied())),
    ));
    let l22: Vec<f64> = reports.iter().filter_map(|r| r.lemma22_ratio().value()).collect();
    let w22 = Window::of(l22.iter().copied());
    out.push(NamedCheck::new(
        "|C1-C2| energy/|Q| window C/c <= 10",
        match w22 {
            Some(w) => w.positive() && w.ratio() <= 10.0,
            // Q vanishes for symmetric data; the check does not apply.
            None => !reports.is_empty(),
        },
        match w22 {
            Some(w) => format!("{w:?}"),
            None => "NOT_APPLICABLE".into(),
        },
    ));
    out.push(NamedCheck::new(
        "Q routes agree",
        all(&|r| r.q_route_gap() <= 1e-6),
        format!("max gap {:e}", reports.iter().map(|r| r.q_route_gap()).fold(0.0, f64::max)),
    ));
    out
}

/// Discrete Dirichlet principle against the patched competitor, and the
/// gap lower bound, on every row.
pub fn dirichlet_checks(table: &SweepTable) -> Vec<NamedCheck> {
    let reports: Vec<_> = table.rows.iter().filter_map(|r| r.report.as_ref()).collect();
    let solved = !reports.is_empty() && reports.len() == table.rows.len();
    let worst_w = reports.iter().map(|r| r.energy_w / r.energy_v1).fold(f64::INFINITY, f64::min);
    let worst_gap =
        reports.iter().flat_map(|r| r.gap_lower.iter().map(move |g| r.energy_v1 / g)).fold(f64::INFINITY, f64::min);
    vec![
        NamedCheck::new(
            "energy(v1) <= energy(W)",
            solved && reports.iter().all(|r| r.energy_v1 <= r.energy_w * (1.0 + 1e-9)),
            format!("min energy(W)/energy(v1) = {worst_w}"),
        ),
        NamedCheck::new(
            "energy(v1) >= 0.85 gap lower",
            solved && reports.iter().all(|r| r.gap_lower.iter().all(|g| r.energy_v1 >= 0.85 * g)),
            format!("min energy(v1)/lower = {worst_gap}"),
        ),
    ]
}
