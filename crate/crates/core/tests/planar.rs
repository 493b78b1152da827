use std::f64::consts::PI;

use magsplit::frozen;
use magsplit::linalg::{axpy, dot, norm, C64};
use magsplit::model::ModelConfig;
use magsplit::planar::{
    build_hamiltonian, build_with_depths, disc_rect_area, lowest_eigenpairs, magnetic_translate, magnetic_translate_by, sample_radial,
    splitting, well_area, write_grid_dump, DiscreteOperator, GridDumpMeta, Wells,
};
use magsplit::radial::{decay_bounds, solve_ground_state};
use magsplit::reduction::orbital_basis;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tight(lambda: f64) -> ModelConfig {
    let mut cfg = ModelConfig::reference(lambda, -2.0, 0.5, 2.0);
    cfg.tolerances.eigen_rel = 1e-13;
    cfg
}

fn residual(op: &DiscreteOperator, v: &[C64], e: f64) -> f64 {
    let mut y = vec![C64::new(0.0, 0.0); v.len()];
    op.apply(v, &mut y);
    axpy(C64::new(-e, 0.0), v, &mut y);
    norm(&y) / norm(v)
}

#[test]
fn hermitian_on_random_pairs() {
    let op = build_hamiltonian(&tight(10.0), Wells::Double).unwrap();
    let (n, ny) = (op.dimension(), op.grid.ny);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..2000 {
        let i = rng.random_range(0..n);
        let j = match rng.random_range(0..5) {
            0 => i.saturating_sub(1),
            1 => (i + 1).min(n - 1),
            2 => i.saturating_sub(ny),
            3 => (i + ny).min(n - 1),
            _ => rng.random_range(0..n),
        };
        assert_eq!(op.entry(i, j), op.entry(j, i).conj(), "({i}, {j})");
    }
}

#[test]
fn uniform_plaquette_flux() {
    let op = build_hamiltonian(&tight(10.0), Wells::Double).unwrap();
    let g = op.grid;
    let want = C64::from_polar(1.0, op.b * g.h * g.h);
    let mut worst: f64 = 0.0;
    for i in 0..g.nx - 1 {
        for j in 0..g.ny - 1 {
            worst = worst.max((op.plaquette_phase(i, j) - want).norm());
        }
    }
    assert!(worst < 1e-13, "{worst}");
}

#[test]
fn cell_fractions_cover_the_disc() {
    for h in [0.1, 0.0371, 0.01] {
        assert!((well_area(0.5, h) - PI * 0.25).abs() < 1e-12, "h = {h}");
    }
    assert_eq!(disc_rect_area(0.5, 2.0, 3.0, 2.0, 3.0), 0.0);
    assert!((disc_rect_area(0.5, 0.0, 1.0, 0.0, 1.0) - PI * 0.25 / 4.0).abs() < 1e-14);
}

#[test]
fn single_well_matches_radial() {
    for lambda in [8.0, 10.0] {
        let cfg = tight(lambda);
        let op = build_hamiltonian(&cfg, Wells::Single).unwrap();
        let e_radial = solve_ground_state(&cfg).unwrap().e0;
        let e = lowest_eigenpairs(&op, 1, e_radial - 0.1 * lambda).unwrap().eigenvalues[0];
        assert!(((e - e_radial) / e_radial).abs() <= 0.005, "λ = {lambda}: {e} vs {e_radial}");
    }
}

#[test]
fn grid_convergence_of_e0() {
    let cfg = tight(10.0);
    let shift = solve_ground_state(&cfg).unwrap().e0 - 1.0;
    let e = |div: f64| {
        let mut c = cfg.clone();
        c.grid.divisions = div;
        lowest_eigenpairs(&build_hamiltonian(&c, Wells::Single).unwrap(), 1, shift).unwrap().eigenvalues[0]
    };
    let (coarse, fine) = (e(8.0), e(8.0 * 2f64.sqrt()));
    assert!(((coarse - fine) / fine).abs() <= 0.002, "{coarse} vs {fine}");
}

#[test]
fn translation_identity_and_errors() {
    let op = build_hamiltonian(&tight(8.0), Wells::Single).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let v: Vec<C64> = (0..op.dimension()).map(|_| C64::new(rng.random(), rng.random())).collect();
    assert_eq!(magnetic_translate(&v, &op.grid, op.b, 0).unwrap(), v);
    assert!(magnetic_translate_by(&v, &op.grid, op.b, 0.3 * op.grid.h).is_err());
    assert!(magnetic_translate(&v[1..], &op.grid, op.b, 1).is_err());
}

#[test]
fn translation_commutes_with_the_operator() {
    let mut prev = f64::INFINITY;
    for div in [8.0, 16.0] {
        let mut cfg = tight(8.0);
        cfg.grid.divisions = div;
        let gs = solve_ground_state(&cfg).unwrap();
        let left = build_with_depths(&cfg, -2.0, 0.0, Wells::Single).unwrap();
        let right = build_with_depths(&cfg, 0.0, -2.0, Wells::Single).unwrap();
        let phi = sample_radial(&left.grid, |r| gs.phi(r)).unwrap();
        let moved = magnetic_translate(&phi, &left.grid, cfg.b(), left.grid.steps as i64).unwrap();
        let (r0, r1) = (residual(&left, &phi, gs.e0), residual(&right, &moved, gs.e0));
        assert!((r0 - r1).abs() <= 1e-10 * r0, "{r0} vs {r1}");
        assert!(r1 < prev);
        prev = r1;
    }
}

#[test]
fn discrete_translate_is_an_eigenvector() {
    let cfg = tight(8.0);
    let pair = orbital_basis(&cfg).unwrap();
    let right = build_with_depths(&cfg, 0.0, -2.0, Wells::Single).unwrap();
    let with = residual(&right, &pair.phi_d, pair.e0);
    let plain = residual(&right, &magnetic_translate(&pair.phi0, &right.grid, 0.0, right.grid.steps as i64).unwrap(), pair.e0);
    assert!(with <= 1e-11 * right.norm_estimate(), "{with}");
    assert!(plain > 1.0);
}

#[test]
fn double_well_states_are_even_and_odd() {
    let cfg = tight(8.0);
    let pair = orbital_basis(&cfg).unwrap();
    let op = build_hamiltonian(&cfg, Wells::Double).unwrap();
    let eig = lowest_eigenpairs(&op, 2, pair.e0 - 0.8).unwrap();
    for psi in &eig.eigenvectors {
        let (a, b) = (dot(&pair.phi0, psi).norm(), dot(&pair.phi_d, psi).norm());
        assert!((a - b).abs() <= 1e-6 * a, "{a} vs {b}");
        assert!(a > 0.6);
    }
}

#[test]
fn variational_shift_is_the_other_well() {
    let cfg = tight(10.0);
    let pair = orbital_basis(&cfg).unwrap();
    let op = build_hamiltonian(&cfg, Wells::Double).unwrap();
    let shift = op.expectation(&pair.phi0) - pair.e0;
    let v_d: f64 = pair.phi0.iter().zip(op.potential.iter().zip(&pair.single.potential)).map(|(p, (t, s))| p.norm_sqr() * (t - s)).sum();
    // the direct difference carries rounding of order ε·|e₀|
    assert!((shift - v_d).abs() <= 64.0 * f64::EPSILON * pair.e0.abs(), "{shift} vs {v_d}");
    assert!(v_d < 0.0);
    // λ²|v|·πa²·(window·K·upper(|d| − a))²
    let gs = solve_ground_state(&cfg).unwrap();
    let env = frozen::WINDOW * frozen::DECAY_UPPER_K * decay_bounds(&gs).upper(1.5);
    assert!(v_d.abs() <= 100.0 * 2.0 * PI * 0.25 * env * env, "{v_d}");
}

#[test]
fn single_well_gap_floor() {
    for lambda in [6.0, 8.0, 10.0, 12.0] {
        let p = orbital_basis(&tight(lambda)).unwrap();
        assert!(p.e1 - p.e0 >= frozen::SINGLE_GAP_FLOOR, "λ = {lambda}: {}", p.e1 - p.e0);
    }
}

#[test]
fn unresolved_gap_is_flagged() {
    let rep = splitting(&ModelConfig::reference(10.0, -2.0, 0.5, 2.0)).unwrap();
    assert!(!rep.resolved);
    let rep = splitting(&tight(10.0)).unwrap();
    assert!(rep.resolved && rep.gap > 0.0);
    assert!(rep.lower_bound < rep.gap && rep.gap < rep.upper_bound);
}

#[test]
fn memory_cap_refuses() {
    let mut cfg = tight(10.0);
    cfg.grid.max_memory_mb = 1;
    assert!(matches!(build_hamiltonian(&cfg, Wells::Double), Err(magsplit::Error::MemoryCap { .. })));
}

#[test]
fn shift_must_sit_below_the_spectrum() {
    let cfg = tight(10.0);
    let op = build_hamiltonian(&cfg, Wells::Single).unwrap();
    assert!(lowest_eigenpairs(&op, 1, 0.0).is_err());
}

#[test]
fn grid_dump_round_trip() {
    let op = build_hamiltonian(&tight(8.0), Wells::None).unwrap();
    let v: Vec<C64> = (0..op.dimension()).map(|k| C64::new(k as f64, -(k as f64) * 0.5)).collect();
    let dir = std::env::temp_dir().join(format!("magsplit-dump-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let stem = dir.join("state");
    write_grid_dump(&stem, &op.grid, &v).unwrap();
    let bytes = std::fs::read(stem.with_extension("bin")).unwrap();
    assert_eq!(bytes.len(), 16 * v.len());
    let back: Vec<C64> = bytes
        .chunks_exact(16)
        .map(|c| C64::new(f64::from_le_bytes(c[..8].try_into().unwrap()), f64::from_le_bytes(c[8..].try_into().unwrap())))
        .collect();
    assert_eq!(back, v);
    let meta: GridDumpMeta = serde_json::from_slice(&std::fs::read(stem.with_extension("json")).unwrap()).unwrap();
    assert_eq!((meta.nx, meta.ny, meta.spacing), (op.grid.nx, op.grid.ny, op.grid.h));
    std::fs::remove_dir_all(&dir).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn translate_back_restores_interior(steps in -20i64..20, seed in 0u64..1000) {
        let op = build_hamiltonian(&tight(8.0), Wells::None).unwrap();
        let g = op.grid;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<C64> = (0..g.len()).map(|_| C64::new(rng.random(), rng.random())).collect();
        let there = magnetic_translate(&v, &g, op.b, steps).unwrap();
        let back = magnetic_translate(&there, &g, op.b, -steps).unwrap();
        for i in steps.unsigned_abs() as usize..g.nx - steps.unsigned_abs() as usize {
            for j in 0..g.ny {
                let k = g.index(i, j);
                prop_assert!((back[k] - v[k]).norm() <= 1e-14 * v[k].norm().max(1.0));
            }
        }
    }

    #[test]
    fn apply_is_hermitian_form(seed in 0u64..1000) {
        let op = build_hamiltonian(&tight(6.0), Wells::Double).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = op.dimension();
        let x: Vec<C64> = (0..n).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let y: Vec<C64> = (0..n).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let (mut hx, mut hy) = (vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n]);
        op.apply(&x, &mut hx);
        op.apply(&y, &mut hy);
        let (a, b) = (dot(&y, &hx), dot(&hy, &x));
        prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0) * op.norm_estimate());
    }
}
