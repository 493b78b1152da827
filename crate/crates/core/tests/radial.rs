use magsplit::frozen;
use magsplit::hopping::decay_window_ok;
use magsplit::model::ModelConfig;
use magsplit::radial::{decay_bounds, evaluate_phi_out, normalization_bracket, overlap_well_integral, solve_ground_state, GroundState};
use proptest::prelude::*;
use std::sync::OnceLock;

fn reference(lambda: f64) -> GroundState {
    solve_ground_state(&ModelConfig::reference(lambda, -2.0, 0.5, 2.0)).unwrap()
}

fn lambda10() -> &'static GroundState {
    static GS: OnceLock<GroundState> = OnceLock::new();
    GS.get_or_init(|| reference(10.0))
}

#[test]
fn free_case_is_exact_landau_level() {
    for lambda in [1.0, 6.5, 40.0] {
        let gs = solve_ground_state(&ModelConfig::reference(lambda, 0.0, 0.5, 2.0)).unwrap();
        assert_eq!(gs.e0, lambda);
        assert!(gs.is_free());
        let c = (lambda / (2.0 * std::f64::consts::PI)).sqrt();
        assert!((gs.c_lambda / c - 1.0).abs() < 1e-14);
        let r = 1.3;
        let want = c * (-lambda * r * r / 4.0).exp();
        assert!((gs.phi(r).unwrap() / want - 1.0).abs() < 1e-12);
    }
}

#[test]
fn binding_energy_is_order_lambda() {
    for lambda in [6.0, 10.0, 20.0, 40.0] {
        let gs = reference(lambda);
        let shifted = gs.e0 + 2.0 * lambda * lambda;
        assert!(shifted > 0.0 && shifted < 10.0 * lambda, "λ = {lambda}: e0 + 2λ² = {shifted}");
    }
}

#[test]
fn solved_states_meet_tolerances() {
    for lambda in [4.0, 8.0, 16.0, 32.0] {
        let gs = reference(lambda);
        let tol = &gs.config.tolerances;
        assert!(gs.match_residual <= tol.match_rel * 10.0, "λ = {lambda}: {}", gs.match_residual);
        assert!(gs.norm_error <= 1e-8, "λ = {lambda}: {}", gs.norm_error);
        assert!(gs.alpha > 0.0);
        assert!(gs.nu > 0.0 && gs.nu <= 2.0 / 2.0 + 1.0);
        assert!(gs.interior_samples.iter().all(|s| s.1 > 0.0), "nodeless");
    }
}

#[test]
fn nu_reported_trend() {
    let nus: Vec<f64> = [6.0, 8.0, 10.0, 12.0].iter().map(|&l| reference(l).nu).collect();
    assert!(nus.windows(2).all(|w| w[1] > w[0]), "{nus:?}");
}

#[test]
fn continuous_across_the_edge() {
    let gs = lambda10();
    let (r_a, inside) = *gs.interior_samples.last().unwrap();
    assert_eq!(r_a, 0.5);
    let outside = evaluate_phi_out(gs, 0.5 * (1.0 + 1e-12)).unwrap();
    assert!((outside / inside - 1.0).abs() <= 1e-9, "{inside} vs {outside}");
    assert!((gs.phi(0.5).unwrap() / inside - 1.0).abs() <= 1e-9);
}

#[test]
fn exterior_decreasing() {
    let gs = lambda10();
    assert!(evaluate_phi_out(gs, 1.0).unwrap() > evaluate_phi_out(gs, 1.5).unwrap());
}

#[test]
fn exterior_rejects_inside_points() {
    let gs = lambda10();
    assert!(evaluate_phi_out(gs, 0.5).is_err());
    assert!(evaluate_phi_out(gs, 0.1).is_err());
}

#[test]
fn decay_envelope_example() {
    let gs = reference(20.0);
    let b = decay_bounds(&gs);
    let v = evaluate_phi_out(&gs, 1.5).unwrap();
    assert!(b.lower(1.5) < v && v < b.upper(1.5), "{} < {v} < {}", b.lower(1.5), b.upper(1.5));
}

#[test]
fn mu_constants() {
    let b = decay_bounds(lambda10());
    assert!((b.mu0 - 2.0 * 0.5f64.powf(-1.5)).abs() < 1e-12);
    assert!((b.mu0 - 5.65685).abs() < 1e-5);
    let mu1 = 0.5 * 0.5 * (0.25 * 1.5f64.powi(2) + 4.0) / (0.25 + b.mu0) + 0.25;
    assert!((b.mu1 - mu1).abs() < 1e-14);
}

#[test]
fn decay_window_across_lambda() {
    // φ/lower grows like e^{cλ}, so the frozen lower prefactor holds from the reference λ up
    for lambda in [10.0, 20.0, 40.0] {
        let gs = reference(lambda);
        for k in 1..=40 {
            let r = 0.5 + 3.5 * k as f64 / 40.0;
            assert!(decay_window_ok(&gs, r).unwrap(), "λ = {lambda}, r = {r}");
        }
    }
}

#[test]
fn overlap_integral_positive_with_floor() {
    let vals: Vec<f64> = [10.0, 20.0, 40.0].iter().map(|&l| overlap_well_integral(&reference(l)).unwrap().value).collect();
    assert!(vals.iter().all(|&v| v > 0.0));
    // a λ-independent floor: the smallest value stays within a fixed factor of the largest
    let (lo, hi) = vals.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(lo >= 0.25 * hi, "{vals:?}");
    let free = solve_ground_state(&ModelConfig::reference(10.0, 0.0, 0.5, 2.0)).unwrap();
    assert_eq!(overlap_well_integral(&free).unwrap().value, 0.0);
}

#[test]
fn sup_norm_scale() {
    for lambda in [10.0, 20.0, 40.0] {
        let o = overlap_well_integral(&reference(lambda)).unwrap();
        assert!(o.sup_over_lambda_sq <= frozen::WINDOW * frozen::SUP_NORM_K, "λ = {lambda}");
    }
}

#[test]
fn normalization_bracket_holds() {
    for lambda in [10.0, 20.0] {
        let gs = reference(lambda);
        let nb = normalization_bracket(&gs).unwrap();
        assert!(nb.log_lower_shape < gs.log_c_lambda && gs.log_c_lambda < nb.log_upper, "λ = {lambda}");
        assert!(frozen::within_window(gs.log_c_lambda, nb.log_lower_shape, nb.log_upper, frozen::CLAMBDA_LOWER_K, frozen::CLAMBDA_UPPER_K));
    }
}

#[test]
fn rejects_unsupported_configs() {
    let mut cfg = ModelConfig::reference(10.0, -2.0, 0.5, 2.0);
    cfg.b = Some(5.0);
    assert!(solve_ground_state(&cfg).is_err());
    assert!(solve_ground_state(&ModelConfig::reference(10.0, 1.0, 0.5, 2.0)).is_err());
}

#[test]
fn serde_round_trip_is_exact() {
    let gs = lambda10();
    let back: GroundState = serde_json::from_str(&serde_json::to_string(gs).unwrap()).unwrap();
    assert_eq!(&back, gs);
    for r in [0.6, 1.0, 3.7] {
        assert_eq!(evaluate_phi_out(&back, r).unwrap(), evaluate_phi_out(gs, r).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn exterior_positive_and_monotone(r in 0.5001f64..6.0, dr in 1e-3f64..1.0) {
        let gs = lambda10();
        let a = gs.log_phi_out(r).unwrap();
        let b = gs.log_phi_out(r + dr).unwrap();
        prop_assert!(a.is_finite() && b < a);
    }

    #[test]
    fn interior_profile_matches_samples(k in 0usize..513) {
        let gs = lambda10();
        let (r, p) = gs.interior_samples[k];
        prop_assert!((gs.phi(r).unwrap() / p - 1.0).abs() < 1e-12);
    }
}
