use narrowgap::capacity::*;
use narrowgap::geometry::{Order, VanishingOrders};
use narrowgap::Error;
use proptest::prelude::*;

fn spec(orders: &[f64], r: f64, eps: f64) -> GapIntegralSpec {
    let o = VanishingOrders::finite_list(orders).unwrap();
    let n = o.dim();
    GapIntegralSpec::new(o, r, n, eps).unwrap()
}

#[test]
fn flat_gap_integral_is_exact() {
    for n in [2usize, 3, 4] {
        let o = VanishingOrders::new(vec![Order::Infinite; n - 1]).unwrap();
        let s = GapIntegralSpec::new(o, 0.7, n, 1e-3).unwrap();
        let want = (1.4f64).powi(n as i32 - 1) / 1e-3;
        assert!((gap_integral(&s, DEFAULT_TOL).unwrap() - want).abs() <= 1e-12 * want);
    }
}

#[test]
fn one_dimensional_closed_form() {
    // ∫_{-r}^{r} dx/(ε + x²) = 2 atan(r/√ε)/√ε
    for eps in [1e-6, 1e-3, 0.1] {
        let r = 0.8;
        let want = 2.0 * (r / f64::sqrt(eps)).atan() / eps.sqrt();
        let got = gap_integral(&spec(&[1.0], r, eps), 1e-10).unwrap();
        assert!((got - want).abs() <= 1e-8 * want, "{eps}: {got} vs {want}");
    }
}

#[test]
fn bad_tolerance_is_rejected() {
    assert!(matches!(gap_integral(&spec(&[1.0], 1.0, 0.1), 0.5), Err(Error::InvalidInput(_))));
}

#[test]
fn regimes_from_examples() {
    let eps: Vec<f64> = (2..=8).map(|k| 10f64.powi(-k)).collect();
    for (orders, regime) in [
        (vec![1.0], Regime::GammaLt1),
        (vec![1.0, 2.0], Regime::GammaLt1),
        (vec![1.0, 1.0], Regime::GammaEq1),
        (vec![1.0, 1.0, 1.0], Regime::GammaGt1),
    ] {
        let o = VanishingOrders::finite_list(&orders).unwrap();
        let n = o.dim();
        let b = verify_claim(&o, 1.0, n, &eps, 5.0, DEFAULT_TOL).unwrap();
        assert_eq!(b.regime, regime);
        assert!(b.success, "{orders:?}: window {}", b.measured_hi / b.measured_lo);
    }
}

#[test]
fn claim_needs_three_decades() {
    let o = VanishingOrders::finite_list(&[1.0]).unwrap();
    assert!(verify_claim(&o, 1.0, 2, &[1e-3, 1e-2], 5.0, DEFAULT_TOL).is_err());
}

#[test]
fn monte_carlo_is_reproducible() {
    let s = spec(&[1.0, 2.0], 1.0, 0.05);
    let a = gap_integral_mc(&s, 100_000, 7).unwrap();
    let b = gap_integral_mc(&s, 100_000, 7).unwrap();
    assert_eq!(a, b);
    let q = gap_integral(&s, DEFAULT_TOL).unwrap();
    assert!((a.estimate - q).abs() <= 4.0 * a.stderr);
}

#[test]
fn sin_cos_beta_values() {
    // ∫_0^{π/2} sin^{a} cos^{b} = B((a+1)/2, (b+1)/2)/2; a = b = 0 gives π/2
    assert!((sin_cos_integral(0.0, 0.0).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    assert!((sin_cos_integral(1.0, 1.0).unwrap() - 0.5).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn radial_gamma_one_closed_form(log_eps in -10.0..1.0f64, r in 0.01..10.0f64) {
        let eps = 10f64.powf(log_eps);
        let want = 0.5 * (r * r / eps).ln_1p();
        let got = radial_integral(1.0, eps, r).unwrap();
        prop_assert!((got - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn radial_is_monotone(gamma in 0.1..2.0f64, eps in 1e-6..1.0f64, r in 0.1..3.0f64) {
        let a = radial_integral(gamma, eps, r).unwrap();
        prop_assert!(a > 0.0);
        prop_assert!(radial_integral(gamma, eps * 1.5, r).unwrap() < a);
        prop_assert!(radial_integral(gamma, eps, r * 1.5).unwrap() > a);
    }

    #[test]
    fn gap_integral_decreases_in_epsilon(a1 in 1.0..4.0f64, a2 in 1.0..4.0f64, log_eps in -6.0..-1.0f64) {
        let eps = 10f64.powf(log_eps);
        let lo = gap_integral(&spec(&[a1, a2], 1.0, eps), 1e-7).unwrap();
        let hi = gap_integral(&spec(&[a1, a2], 1.0, eps * 1.3), 1e-7).unwrap();
        prop_assert!(hi < lo);
    }

    #[test]
    fn reduction_sandwich_holds(a1 in 1.0..4.0f64, a2 in 1.0..4.0f64, log_eps in -7.0..-1.0f64, r in 0.5..1.5f64) {
        let eps = 10f64.powf(log_eps);
        let o = VanishingOrders::finite_list(&[a1, a2]).unwrap();
        if eps < r * r {
            let s = reduction_sandwich(&o, r, 3, eps, DEFAULT_TOL).unwrap();
            prop_assert!(s.holds, "{s:?}");
            prop_assert!(s.lower <= s.upper);
        }
    }
}
