use narrowgap::geometry::*;
use narrowgap::Error;
use proptest::prelude::*;

fn params() -> Params {
    Params::new()
}

#[test]
fn preset_names_round_trip_through_serde_and_strings() {
    for p in PresetName::ALL {
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, format!("\"{}\"", p.as_str()));
        assert_eq!(serde_json::from_str::<PresetName>(&json).unwrap(), p);
        assert_eq!(p.as_str().parse::<PresetName>().unwrap(), p);
    }
    assert!(matches!("three_disks".parse::<PresetName>(), Err(Error::UnknownPreset(_))));
}

#[test]
fn every_preset_builds_and_validates_across_its_range() {
    for p in PresetName::ALL {
        for frac in [1.0, 0.5, 0.05] {
            let eps = p.eps_max() * frac;
            let c = preset(p, eps, &params()).unwrap_or_else(|e| panic!("{p} at {eps}: {e}"));
            c.validate().unwrap();
            assert!(!c.patches.is_empty(), "{p}");
            assert_eq!(c.scene.is_some(), p != PresetName::IntegralOnly3d);
        }
    }
}

#[test]
fn epsilon_outside_range_is_rejected() {
    for p in PresetName::ALL {
        assert!(matches!(preset(p, 0.0, &params()), Err(Error::EpsilonOutOfRange { .. })), "{p}");
        assert!(matches!(preset(p, p.eps_max() * 1.01, &params()), Err(Error::EpsilonOutOfRange { .. })), "{p}");
    }
}

#[test]
fn preset_gammas() {
    let g = |p: PresetName| config_gamma(&preset(p, 0.05, &params()).unwrap()).unwrap();
    assert_eq!(g(PresetName::TwoDisks2d), 0.5);
    assert_eq!(g(PresetName::FlatGap2d), 0.0);
    assert_eq!(g(PresetName::PowerGap2d), 0.25);
    assert_eq!(g(PresetName::CapacitorStrip2d), 0.0);
    assert_eq!(g(PresetName::IntegralOnly3d), 0.75);
}

#[test]
fn unknown_parameter_is_rejected() {
    let mut p = params();
    p.insert("radius_typo".into(), 1.0.into());
    assert!(preset(PresetName::TwoDisks2d, 0.1, &p).is_err());
}

#[test]
fn document_round_trip() {
    let mut p = params();
    p.insert("radius".into(), 1.5.into());
    let c = preset(PresetName::TwoDisks2d, 0.03, &p).unwrap();
    let back = Configuration::from_json(&c.to_json()).unwrap();
    assert_eq!(back.to_document(), c.to_document());
    assert_eq!(back.patches.len(), c.patches.len());
    let d = c.with_epsilon(0.01).unwrap();
    assert_eq!(d.epsilon, 0.01);
    assert_eq!(d.params, c.params);
}

#[test]
fn two_disks_classification() {
    let c = preset(PresetName::TwoDisks2d, 0.1, &params()).unwrap();
    assert_eq!(c.classify([0.0, 0.0]), Region::InGap(0));
    assert_eq!(c.classify([0.0, -0.6]), Region::InD1);
    assert_eq!(c.classify([0.0, 0.6]), Region::InD2);
    assert_eq!(c.classify([100.0, 0.0]), Region::OutsideOmega);
}

fn arb_order() -> impl Strategy<Value = Order> {
    prop_oneof![3 => (1.0..10.0f64).prop_map(Order::Finite), 1 => Just(Order::Infinite)]
}

proptest! {
    #[test]
    fn gamma_is_permutation_invariant(mut v in prop::collection::vec(arb_order(), 1..5), seed in any::<u64>()) {
        let g = gamma_of(&v).unwrap();
        let k = v.len();
        v.rotate_left((seed as usize) % k);
        v.reverse();
        prop_assert!((gamma_of(&v).unwrap() - g).abs() <= 1e-15 * (1.0 + g));
    }

    #[test]
    fn gamma_decreases_as_an_order_grows(v in prop::collection::vec(arb_order(), 1..5), idx in any::<usize>(), bump in 0.0..5.0f64) {
        let g = gamma_of(&v).unwrap();
        let mut w = v.clone();
        let i = idx % w.len();
        w[i] = match w[i] {
            Order::Finite(a) => Order::Finite(a + bump),
            Order::Infinite => Order::Infinite,
        };
        prop_assert!(gamma_of(&w).unwrap() <= g + 1e-15);
        let mut inf = v.clone();
        inf[i] = Order::Infinite;
        prop_assert!(gamma_of(&inf).unwrap() <= g + 1e-15);
    }

    #[test]
    fn orders_below_one_are_rejected(a in 0.0..0.999f64) {
        prop_assert!(VanishingOrders::new(vec![Order::Finite(a)]).is_err());
    }

    /// Regions agree with the shapes: inclusions are closed, Ω open, and
    /// the gap label matches the first patch containing the point.
    #[test]
    fn classification_is_a_partition(x in -3.0..3.0f64, y in -3.0..3.0f64, which in 0usize..5) {
        let p = PresetName::ALL[which];
        let c = preset(p, p.eps_max() / 2.0, &Params::new()).unwrap();
        let scene = c.scene().unwrap();
        let q = c.wrap([x, y]);
        let region = c.classify([x, y]);
        let in_omega = scene.omega.indicator(q) < 0.0;
        let in1 = scene.d1.indicator(q) <= 0.0;
        let in2 = scene.d2.indicator(q) <= 0.0;
        prop_assert!(!(in1 && in2));
        let expected = if !in_omega {
            Region::OutsideOmega
        } else if in1 {
            Region::InD1
        } else if in2 {
            Region::InD2
        } else {
            match c.patch_at(q, 1.0) {
                Some(i) => Region::InGap(i),
                None => Region::InFar,
            }
        };
        prop_assert_eq!(region, expected);
    }

    #[test]
    fn gap_stays_inside_declared_sandwich(frac in 0.01..1.0f64, which in 0usize..6) {
        let p = PresetName::ALL[which];
        let eps = p.eps_max() * frac;
        let c = preset(p, eps, &Params::new()).unwrap();
        for patch in &c.patches {
            let v = validate_gap(patch, eps, 256).unwrap();
            prop_assert!(v.within(patch.sandwich), "{p}: [{}, {}]", v.c_lo, v.c_hi);
        }
    }
}
