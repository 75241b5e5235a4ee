use mech_scenarios::properties::property_checks;
use mech_scenarios::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn resolve_accepts_exactly_valid_steps(dt in -1.0..1.0f64, t_end in -5.0..20.0f64) {
        let s = lookup("damped_oscillator").unwrap();
        let r = s.resolve(&Overrides { dt: Some(dt), t_end: Some(t_end), ..Default::default() });
        prop_assert_eq!(r.is_ok(), dt > 0.0 && t_end > 0.0);
        if let Ok(cfg) = r {
            prop_assert_eq!(cfg.dt, dt);
            prop_assert_eq!(cfg.t_end, t_end);
        }
    }

    #[test]
    fn restitution_domain(e in -1.0..2.0f64) {
        let s = lookup("pendulum_floor").unwrap();
        let r = s.resolve(&Overrides { e: Some(e), ..Default::default() });
        prop_assert_eq!(r.is_ok(), (0.0..=1.0).contains(&e));
    }

    #[test]
    fn flags_over_config_over_defaults(a in 1e-3..1.0f64, b in 1e-3..1.0f64, k in 0.1..5.0f64) {
        let config = Overrides { dt: Some(a), params: [("k".to_string(), k)].into(), ..Default::default() };
        let flags = Overrides { dt: Some(b), ..Default::default() };
        let cfg = lookup("damped_oscillator").unwrap().resolve(&config.layered(&flags)).unwrap();
        prop_assert_eq!(cfg.dt, b);
        prop_assert_eq!(cfg.param("k"), k);
        prop_assert_eq!(cfg.param("m"), 1.0);
    }

    #[test]
    fn check_constructors_agree_with_thresholds(v in -1.0..1.0f64, tol in 0.0..1.0f64) {
        prop_assert_eq!(Check::below("x", CheckKind::Identity, v.abs(), tol).pass, v.abs() < tol);
        prop_assert_eq!(Check::at_least("x", CheckKind::Event, v, tol).pass, v >= tol);
        prop_assert!(Check::report("x", v).pass);
    }

    #[test]
    fn carnot_balance_holds_for_any_seed(seed in any::<u64>()) {
        let s = lookup("carnot_restitution").unwrap();
        let o = Overrides { seed: Some(seed), params: [("events".to_string(), 50.0)].into(), ..Default::default() };
        let report = s.run_checks(&s.resolve(&o).unwrap());
        prop_assert!(report.pass(), "{:?}", report.checks);
    }

    #[test]
    fn sphere_projector_for_any_shape(r in 0.1..2.0f64, k in 0.1..2.0f64) {
        let s = lookup("rolling_sphere_jump").unwrap();
        let o = Overrides { params: [("r".to_string(), r), ("k".to_string(), k)].into(), ..Default::default() };
        let report = s.run_checks(&s.resolve(&o).unwrap());
        prop_assert!(report.pass(), "{:?}", report.checks);
    }
}

#[test]
fn property_sweeps_pass_for_several_seeds() {
    for seed in [1, 2, 3] {
        let checks = property_checks(seed).unwrap();
        assert!(checks.iter().all(|c| c.pass), "seed {seed}: {checks:?}");
    }
}
