use narrowgap::analysis::*;
use narrowgap::geometry::{preset, ConfigDocument, Params, PresetName};
use narrowgap::pde::{build_grid, Session, SolverOptions};
use narrowgap::Error;
use proptest::prelude::*;

fn doc(p: PresetName, eps: f64) -> ConfigDocument {
    ConfigDocument { preset: p, epsilon: eps, params: Params::new(), overrides: Default::default() }
}

const CAP_EPS: [f64; 4] = [0.2, 0.1, 0.05, 0.02];

fn capacitor_sweep() -> SweepTable {
    sweep(
        &doc(PresetName::CapacitorStrip2d, 0.2),
        &CAP_EPS,
        &PhiSpec::builtin(BuiltinPhi::CapacitorDrive),
        &HRule::default(),
        &SweepOptions::default(),
    )
    .unwrap()
}

#[test]
fn eps_list_preconditions() {
    assert!(matches!(check_eps_list(&[0.1, 0.05]), Err(Error::InsufficientRows(2))));
    assert!(check_eps_list(&[0.1, 0.09, 0.08, 0.07]).is_err(), "less than a decade");
    assert!(check_eps_list(&[0.1, 0.1, 0.01, 0.001]).is_err(), "duplicates");
    assert_eq!(check_eps_list(&[0.01, 0.1, 0.05, 0.02]).unwrap(), vec![0.1, 0.05, 0.02, 0.01]);
}

#[test]
fn sweep_with_two_epsilons_needs_more_rows() {
    let err = sweep(
        &doc(PresetName::TwoDisks2d, 0.1),
        &[0.1, 0.05],
        &PhiSpec::builtin(BuiltinPhi::Dipole),
        &HRule::default(),
        &SweepOptions::default(),
    )
    .unwrap_err();
    assert!(err.to_string().contains("need >= 4"), "{err}");
}

#[test]
fn coarse_rule_is_a_resolution_error() {
    let rule = HRule { divisor: 4.0, grading: None };
    assert!(matches!(rule.validate(), Err(Error::Resolution(_))));
}

#[test]
fn capacitor_sweep_is_exact_on_every_row() {
    let t = capacitor_sweep();
    assert_eq!(t.gamma, 0.0);
    for row in &t.rows {
        let r = row.report.as_ref().unwrap();
        assert!(!row.is_flagged(), "{:?}", row.flags);
        assert!((r.sup_grad_u * row.epsilon - 1.0).abs() < 1e-6, "{}", r.sup_grad_u);
        assert!((r.c_diff() - 1.0).abs() < 1e-6);
    }
    let fit = fit_exponent(&t, Quantity::SupGradU, FitModel::Power).unwrap();
    assert!((fit.exponent + 1.0).abs() < 1e-6);
    assert!(structural_checks(&t).iter().filter(|c| c.name.contains("a12")).all(|c| c.pass));
    assert!(dirichlet_checks(&t).iter().all(|c| c.pass));
}

#[test]
fn csv_has_fixed_columns() {
    let t = capacitor_sweep();
    let csv = t.to_csv();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    let mut want = SweepTable::CSV_COLUMNS.join(",");
    want.push_str(",I_patch_0,flags");
    assert_eq!(header, want);
    for line in lines {
        assert_eq!(line.split(',').count(), 15, "{line}");
    }
}

#[cfg(feature = "parallel")]
#[test]
fn csv_is_identical_across_thread_counts() {
    let run = |threads| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(capacitor_sweep).to_csv()
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(1));
}

#[test]
fn search_beats_the_random_pool() {
    let config = preset(PresetName::TwoDisks2d, 0.1, &Params::new()).unwrap();
    let grid = build_grid(&config, &HRule::default().spec(0.1)).unwrap();
    let session = Session::new(&config, &grid, SolverOptions::default()).unwrap();
    let found = find_boundary_data(&session, 8, 42).unwrap();
    assert!(found.beats_random_pool);
    assert!(found.q.abs() > found.pool_best);
    assert!(matches!(found.phi, PhiSpec::Tabulated { .. }));
    let q = session.q_of(&found.phi.boundary_value(&config).unwrap()).unwrap();
    assert!((q - found.q).abs() <= 1e-9 * q.abs());
    // same seed, same answer
    assert_eq!(find_boundary_data(&session, 8, 42).unwrap(), found);
}

#[test]
fn phi_specs_serialize_with_kind_tags() {
    let specs = [
        PhiSpec::builtin(BuiltinPhi::Dipole),
        PhiSpec::Trig { constant: 0.5, harmonics: vec![[1.0, 0.0], [0.0, -2.0]] },
        PhiSpec::Tabulated { angles: vec![-3.0, 0.0, 1.0], values: vec![0.0, 1.0, 0.0] },
        PhiSpec::Search { basis_size: 8 },
    ];
    for s in specs {
        let j = serde_json::to_string(&s).unwrap();
        assert!(j.contains("\"kind\""), "{j}");
        assert_eq!(serde_json::from_str::<PhiSpec>(&j).unwrap(), s);
    }
    assert!(serde_json::from_str::<PhiSpec>(r#"{"kind": "search", "basis_size": 8, "extra": 1}"#).is_err());
    assert!(PhiSpec::Search { basis_size: 2 }.validate().is_err());
}

#[test]
fn power_log_fit_reads_the_log_regime() {
    let eps: Vec<f64> = (1..=6).map(|k| 10f64.powi(-k)).collect();
    let q: Vec<f64> = eps.iter().map(|e| 3.0 / (e * (1.0 / e).ln())).collect();
    let fit = fit_points(&eps, &q, FitModel::PowerLog).unwrap();
    assert!((fit.amplitude - 3.0).abs() < 1e-12);
    assert!(fit.dispersion < 1e-12);
}

proptest! {
    #[test]
    fn power_fit_recovers_exponent(p in -2.0..0.5f64, a in 0.1..10.0f64, noise in prop::collection::vec(-1e-3..1e-3f64, 6)) {
        let eps: Vec<f64> = (0..6).map(|k| 0.1 * 0.5f64.powi(k)).collect();
        let q: Vec<f64> = eps.iter().zip(&noise).map(|(e, n)| a * e.powf(p) * (1.0 + n)).collect();
        let fit = fit_points(&eps, &q, FitModel::Power).unwrap();
        prop_assert!((fit.exponent - p).abs() < 2e-3);
        prop_assert!(fit.r_squared > 0.99 || p.abs() < 0.05);
    }

    #[test]
    fn fit_rejects_nonpositive(k in 0usize..4) {
        let eps = [0.1, 0.05, 0.02, 0.01];
        let mut q = [1.0, 2.0, 3.0, 4.0];
        q[k] = -1.0;
        prop_assert!(matches!(fit_points(&eps, &q, FitModel::Power), Err(Error::NonPositive { .. })), "negative");
    }

    #[test]
    fn periodic_interpolation_is_periodic(t in -10.0..10.0f64) {
        let angles = [-3.0, -1.0, 0.5, 2.0];
        let values = [1.0, -2.0, 0.0, 4.0];
        let a = periodic_interp(&angles, &values, t);
        let b = periodic_interp(&angles, &values, t + 2.0 * std::f64::consts::PI);
        prop_assert!((a - b).abs() < 1e-9);
        prop_assert!((-2.0..=4.0).contains(&a));
    }
}
