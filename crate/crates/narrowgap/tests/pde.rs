use std::sync::{Arc, OnceLock};

use narrowgap::analysis::HRule;
use narrowgap::geometry::{preset, Configuration, Params, PresetName};
use narrowgap::pde::*;
use narrowgap::Error;
use proptest::prelude::*;

struct Fixture {
    config: Configuration,
    grid: Grid,
}

fn two_disks() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let config = preset(PresetName::TwoDisks2d, 0.1, &Params::new()).unwrap();
        let grid = build_grid(&config, &HRule::default().spec(0.1)).unwrap();
        Fixture { config, grid }
    })
}

fn trig(a: f64, b: f64, c: f64) -> BoundaryValue {
    BoundaryValue::Trace(Arc::new(move |p: [f64; 2]| {
        let t = p[1].atan2(p[0]);
        a + b * t.cos() + c * (2.0 * t).sin()
    }))
}

#[test]
fn grid_has_every_boundary_class_and_one_component() {
    let f = two_disks();
    for c in BoundaryClass::ALL {
        assert!(f.grid.has_class(c), "{c:?}");
    }
    assert_eq!(f.grid.components, 1);
    assert!(f.grid.patch.iter().any(|p| p.is_some()));
    assert!(f.grid.cuts.iter().all(|c| c.theta > 0.0 && c.theta <= 1.0));
}

#[test]
fn coarse_spacing_is_a_resolution_error() {
    let f = two_disks();
    let err = build_grid(&f.config, &GridSpec::uniform(0.1 / 4.0)).unwrap_err();
    assert!(matches!(err, Error::Resolution(_)));
    assert!(err.to_string().starts_with("RESOLUTION"));
}

#[test]
fn constants_are_reproduced_exactly() {
    let f = two_disks();
    let u = solve_dirichlet(&f.grid, &BoundaryData::constants(0.7, 0.7, 0.7), 1e-12).unwrap();
    assert!(u.values.iter().all(|v| (v - 0.7).abs() < 1e-9));
    assert!(energy(&f.grid, &u).unwrap() < 1e-12);
}

#[test]
fn fields_from_other_grids_are_rejected() {
    let f = two_disks();
    let other = build_grid(&f.config, &HRule { divisor: 10.0, ..HRule::default() }.spec(0.1)).unwrap();
    let g = Field::constant(&other, 1.0);
    assert!(matches!(energy(&f.grid, &g), Err(Error::GridMismatch)));
}

#[test]
fn capacity_matrix_structure() {
    let f = two_disks();
    let s = Session::new(&f.config, &f.grid, SolverOptions::default()).unwrap();
    let r = s.report(&trig(0.0, 1.0, 0.5)).unwrap();
    assert!(r.failed_checks().is_empty(), "{:?}", r.failed_checks());
    assert!(r.a11 > 0.0 && r.a22 > 0.0 && r.a12 < 0.0);
    assert!(r.det > 0.0);
    assert!(r.q_route_gap() < 1e-9);
    // the two inclusions are mirror images
    assert!((r.a11 - r.a22).abs() < 1e-6 * r.a11);
}

#[test]
fn q_vanishes_on_constants() {
    let f = two_disks();
    let s = Session::new(&f.config, &f.grid, SolverOptions::default()).unwrap();
    let q = s.q_of(&BoundaryValue::Const(3.0)).unwrap();
    let scale = s.q_of(&trig(0.0, 0.0, 1.0)).unwrap().abs().max(1.0);
    assert!(q.abs() < 1e-9 * scale, "{q}");
}

#[test]
fn flipped_a12_is_caught() {
    let f = two_disks();
    let s = Session::new(&f.config, &f.grid, SolverOptions::default()).unwrap();
    let (r, _) = s.report_with(&trig(0.0, 1.0, 0.5), Fault::FlipA12).unwrap();
    let failed = r.failed_checks();
    assert!(failed.contains(&"a12 <= 0"), "{failed:?}");
    assert!(failed.contains(&"flux identity"), "{failed:?}");
}

#[test]
fn preconditioners_agree() {
    let f = two_disks();
    let b = BoundaryData::constants(0.0, 1.0, -1.0);
    let solve = |preconditioner| {
        DirichletSolver::new(&f.grid, SolverOptions { tol: 1e-12, preconditioner }).unwrap().solve(&b).unwrap().0
    };
    let a = solve(PreconditionerKind::Jacobi);
    let c = solve(PreconditionerKind::Cholesky);
    let diff = a.values.iter().zip(&c.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(diff < 1e-8, "{diff}");
}

#[test]
fn exports_have_documented_headers() {
    let f = two_disks();
    let u = Field::from_fn(&f.grid, |p| p[0]);
    let mut bin = Vec::new();
    export::write_binary(&f.grid, &u, &mut bin).unwrap();
    assert_eq!(&bin[..4], export::MAGIC);
    let word = |k: usize| u32::from_le_bytes(bin[4 + 4 * k..8 + 4 * k].try_into().unwrap()) as usize;
    assert_eq!(word(0), 1);
    assert_eq!((word(1), word(2)), (f.grid.nx(), f.grid.ny()));
    let n = f.grid.nx() * f.grid.ny();
    assert_eq!(bin.len(), 16 + 24 + 8 * (f.grid.nx() + f.grid.ny()) + n + 8 * n);

    let mut csv = Vec::new();
    export::write_csv(&f.grid, &u, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with(&format!("# nx={} ny={}", f.grid.nx(), f.grid.ny())));
    assert_eq!(lines.next().unwrap(), "i,j,x,y,class,value");
    assert_eq!(lines.count(), n);

    let mut svg = Vec::new();
    export::write_svg(&f.grid, &gradient_magnitude(&f.grid, &u).unwrap(), &mut svg).unwrap();
    assert!(String::from_utf8(svg).unwrap().starts_with("<svg"));
}

#[test]
fn gradient_of_a_linear_field_is_its_slope() {
    let f = two_disks();
    let u = Field::from_fn(&f.grid, |p| 2.0 * p[0] - p[1]);
    let g = gradient_magnitude(&f.grid, &u).unwrap();
    let want = 5f64.sqrt();
    assert!(g.iter().all(|v| (v - want).abs() < 1e-9));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn energy_is_symmetric_and_bilinear(a in -2.0..2.0f64, b in -2.0..2.0f64, k in 1.0..6.0f64) {
        let grid = &two_disks().grid;
        let f = Field::from_fn(grid, |p| (k * p[0]).sin() + a * p[1]);
        let g = Field::from_fn(grid, |p| p[0] * p[1] + b);
        let fg = energy_inner(grid, &f, &g).unwrap();
        let gf = energy_inner(grid, &g, &f).unwrap();
        prop_assert!((fg - gf).abs() <= 1e-12 * (1.0 + fg.abs()));
        let h = Field::combine(&[(a, &f), (b, &g)]).unwrap();
        let lhs = energy_inner(grid, &h, &g).unwrap();
        let rhs = a * fg + b * energy(grid, &g).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
        prop_assert!(energy(grid, &f).unwrap() >= 0.0);
    }

    #[test]
    fn maximum_principle(a in -1.0..1.0f64, b in -2.0..2.0f64, c in -2.0..2.0f64, d1 in -3.0..3.0f64, d2 in -3.0..3.0f64) {
        let grid = &two_disks().grid;
        let phi = trig(a, b, c);
        let bdata = BoundaryData { omega: phi, d1: BoundaryValue::Const(d1), d2: BoundaryValue::Const(d2) };
        let u = solve_dirichlet(grid, &bdata, 1e-12).unwrap();
        let lo = u.trace.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = u.trace.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (vmin, vmax) = u.min_max();
        let slack = 1e-8 * (1.0 + hi - lo);
        prop_assert!(vmin >= lo - slack && vmax <= hi + slack, "[{vmin}, {vmax}] vs [{lo}, {hi}]");
    }

    #[test]
    fn dirichlet_principle_against_perturbations(amp in -0.5..0.5f64, k in 1.0..8.0f64) {
        let f = two_disks();
        let s = Session::new(&f.config, &f.grid, SolverOptions::default()).unwrap();
        let r = s.report(&trig(0.0, 1.0, 0.0)).unwrap();
        // any field with v1's trace has at least its energy
        let v1 = solve_dirichlet(&f.grid, &BoundaryData::constants(0.0, 1.0, 0.0), 1e-12).unwrap();
        let bump = Field::new(
            &f.grid,
            (0..f.grid.len()).map(|n| { let p = f.grid.point(n); amp * (k * p[0]).sin() * (k * p[1]).cos() }).collect(),
            vec![0.0; f.grid.cuts.len()],
        );
        let w = Field::combine(&[(1.0, &v1), (1.0, &bump)]).unwrap();
        prop_assert!(energy(&f.grid, &w).unwrap() >= r.energy_v1 * (1.0 - 1e-9));
    }
}
