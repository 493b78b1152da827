use magsplit::model::{validate, GridSpec, IterationCaps, ModelConfig, ToleranceSpec, WellSpec};
use proptest::prelude::*;

#[test]
fn reference_is_valid_but_not_strict() {
    let r = validate(&ModelConfig::reference(10.0, -2.0, 0.5, 2.0));
    assert!(r.is_valid(), "{:?}", r.violations);
    assert!(!r.strict_spacing);
    assert!((r.strict_threshold - 4.0 * (2f64.sqrt() + 0.5)).abs() < 1e-12);
}

#[test]
fn shallow_narrow_well_is_strict() {
    let cfg = ModelConfig::reference(10.0, -0.04, 0.1, 1.3);
    let r = validate(&cfg);
    assert!(r.is_valid(), "{:?}", r.violations);
    assert!(r.strict_spacing);
    assert!((r.strict_threshold - 1.2).abs() < 1e-12);
}

#[test]
fn overlapping_wells_rejected() {
    let r = validate(&ModelConfig::reference(10.0, -2.0, 0.5, 0.8));
    assert!(!r.is_valid());
    assert!(r.violations.iter().any(|v| v.contains("overlap")), "{:?}", r.violations);
    assert!(ModelConfig::reference(10.0, -2.0, 0.5, 0.8).require_valid().is_err());
}

#[test]
fn every_violation_listed() {
    let mut cfg = ModelConfig::reference(-1.0, 1.0, -0.5, 2.0);
    cfg.grid.margin_lengths = 1.0;
    cfg.tolerances.eigen_rel = 0.0;
    let r = validate(&cfg);
    assert!(r.violations.len() >= 5, "{:?}", r.violations);
}

#[test]
fn coarse_spacing_rejected() {
    let mut cfg = ModelConfig::reference(10.0, -2.0, 0.5, 2.0);
    cfg.grid.spacing = Some(0.1);
    assert!(!validate(&cfg).is_valid());
    cfg.grid.spacing = Some(2.0 / 37.0);
    assert!(validate(&cfg).is_valid());
    cfg.grid.spacing = Some(0.0555);
    assert!(validate(&cfg).violations.iter().any(|v| v.contains("multiple")));
}

#[test]
fn derived_spacing_divides_separation() {
    for lambda in [4.0, 6.0, 10.0, 17.3, 40.0] {
        let cfg = ModelConfig::reference(lambda, -2.0, 0.5, 2.0);
        let h = cfg.spacing();
        assert!(h <= cfg.ell() / 8.0);
        let steps = cfg.separation / h;
        assert!((steps - steps.round()).abs() < 1e-9);
    }
}

#[test]
fn defaults_fill_missing_fields() {
    let cfg: ModelConfig = serde_json::from_str(r#"{"lambda": 8, "well": {"depth": -2, "radius": 0.5}, "separation": 2}"#).unwrap();
    assert_eq!(cfg, ModelConfig::reference(8.0, -2.0, 0.5, 2.0));
    assert_eq!(cfg.b(), 8.0);
}

#[test]
fn unknown_fields_rejected() {
    let bad = r#"{"lambda": 8, "well": {"depth": -2, "radius": 0.5}, "separation": 2, "lamda": 3}"#;
    assert!(serde_json::from_str::<ModelConfig>(bad).is_err());
}

fn arb_config() -> impl Strategy<Value = ModelConfig> {
    (
        (1e-3f64..1e3, proptest::option::of(1e-3f64..1e3), -50.0f64..0.0, 1e-3f64..5.0, 1e-3f64..50.0),
        (proptest::option::of(1e-4f64..1.0), 8.0f64..64.0, 4.0f64..20.0, 1u64..1 << 20),
        (1e-16f64..1e-2, 1e-16f64..1e-2, 1e-16f64..1e-2, 1usize..10_000, 1usize..10_000),
    )
        .prop_map(|((lambda, b, depth, radius, separation), (spacing, divisions, margin, mem), (q, e, m, i1, i2))| ModelConfig {
            lambda,
            b,
            well: WellSpec::disc(depth, radius),
            separation,
            grid: GridSpec { spacing, divisions, margin_lengths: margin, max_memory_mb: mem, ..GridSpec::default() },
            tolerances: ToleranceSpec {
                quadrature_rel: q,
                eigen_rel: e,
                match_rel: m,
                max_iterations: IterationCaps { bisection: i1, eigen_outer: i2, linear: i1 + i2, quadrature_intervals: i2 },
            },
        })
}

proptest! {
    #[test]
    fn config_round_trips_exactly(cfg in arb_config()) {
        let text = serde_json::to_string(&cfg).unwrap();
        let back: ModelConfig = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn validate_is_deterministic(cfg in arb_config()) {
        prop_assert_eq!(validate(&cfg), validate(&cfg.clone()));
    }
}
