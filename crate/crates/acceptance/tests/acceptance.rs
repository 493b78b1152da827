//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
//! Reference config unless stated: depth −2, a = 0.5, |d| = 2, b = λ.

use std::f64::consts::PI;
use std::time::Instant;

use magsplit::cli::{sweep_point, GroundStateCache, SweepRow};
use magsplit::frozen;
use magsplit::hopping::{hopping_all_routes, hopping_bounds, hopping_ratio_check, kernel_bessel, laplace_exterior_asymptote, log_abs_rho};
use magsplit::model::ModelConfig;
use magsplit::planar::{build_hamiltonian, default_shift, lowest_eigenpairs, Wells};
use magsplit::radial::{decay_bounds, evaluate_phi_out, solve_ground_state, GroundState};
use magsplit::reduction::resolvent_probe;
use magsplit::specfun::{bessel_i0_scaled, ring_phase_integral};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = magsplit::Result<(bool, String)>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn reference(lambda: f64) -> ModelConfig {
    ModelConfig::reference(lambda, -2.0, 0.5, 2.0)
}

fn tight(lambda: f64) -> ModelConfig {
    let mut cfg = reference(lambda);
    cfg.tolerances.eigen_rel = 1e-13;
    cfg
}

fn gs(lambda: f64) -> magsplit::Result<GroundState> {
    solve_ground_state(&reference(lambda))
}

fn landau_level() -> Outcome {
    let start = Instant::now();
    let mut cfg = reference(10.0);
    cfg.tolerances.eigen_rel = 1e-6;
    let op = build_hamiltonian(&cfg, Wells::None)?;
    let e = lowest_eigenpairs(&op, 1, default_shift(&cfg, Wells::None)?)?.eigenvalues[0];
    let rel = (e / 10.0 - 1.0).abs();
    let secs = start.elapsed().as_secs_f64();
    Ok((rel <= 0.01 && secs <= 120.0, format!("E₀ = {e:.6}, |E₀/λ − 1| = {rel:.2e} ≤ 1e-2, {secs:.1} s ≤ 120 s")))
}

fn radial_vs_planar() -> Outcome {
    let mut worst: f64 = 0.0;
    for lambda in [8.0, 10.0] {
        let cfg = tight(lambda);
        let e_radial = solve_ground_state(&cfg)?.e0;
        let op = build_hamiltonian(&cfg, Wells::Single)?;
        let e = lowest_eigenpairs(&op, 1, e_radial - 0.1 * lambda)?.eigenvalues[0];
        worst = worst.max(((e_radial - e) / e).abs());
    }
    Ok((worst <= 0.005, format!("max |e₀ − E₀|/|E₀| = {worst:.2e} ≤ 5e-3 at λ ∈ {{8, 10}}")))
}

fn three_routes() -> Outcome {
    let (mut dis, mut im): (f64, f64) = (0.0, 0.0);
    let mut complete = true;
    for lambda in [6.0, 10.0] {
        let h = hopping_all_routes(&gs(lambda)?, 2.0)?;
        complete &= h.failed_routes.is_empty();
        dis = dis.max(h.route_disagreement());
        im = im.max(h.direct_imaginary_ratio().unwrap_or(f64::INFINITY));
    }
    Ok((complete && dis <= 1e-4 && im <= 1e-8, format!("route disagreement {dis:.2e} ≤ 1e-4, |Im ρ|/|ρ| = {im:.2e} ≤ 1e-8")))
}

fn kernel_positivity() -> Outcome {
    let g = gs(10.0)?;
    let mut bad = 0;
    for i in 0..20 {
        let dist = 1.05 + 2.95 * i as f64 / 19.0;
        for j in 1..=10 {
            let r = 0.5 * j as f64 / 10.0;
            if kernel_bessel(&g, dist, r)?.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
                bad += 1;
            }
        }
    }
    Ok((bad == 0, format!("{bad} violations at 200 nodes, |d| ∈ [1.05, 4], r ∈ (0, a]")))
}

fn ring_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let beta: f64 = rng.random_range(1e-6..50.0);
        let xi = rng.random_range(0.0..beta);
        let z = (beta * beta - xi * xi).sqrt();
        let rhs = 2.0 * PI * z.exp() * bessel_i0_scaled(z)?;
        worst = worst.max((ring_phase_integral(xi, beta)? / rhs - 1.0).abs());
    }
    Ok((worst <= 1e-9, format!("max relative error {worst:.2e} ≤ 1e-9 over 100 (ξ, β)")))
}

fn hopping_sandwich() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for lambda in [8.0, 12.0, 16.0, 20.0] {
        let g = gs(lambda)?;
        let hb = hopping_bounds(&g, 2.0)?;
        let l = log_abs_rho(&g, 2.0)?;
        let lo = hb.log_lower + frozen::HOP_LOWER_K.ln() - frozen::WINDOW.ln();
        let hi = hb.log_upper + frozen::HOP_UPPER_K.ln() + frozen::WINDOW.ln();
        let (rate, slack) = (-4.0 / lambda * l, frozen::RATE_SLACK_C * lambda.ln() / lambda);
        let (rlo, rhi) = (-4.0 / lambda * hb.log_upper - slack, -4.0 / lambda * hb.log_lower + slack);
        let (inside, rate_ok) = (lo <= l && l <= hi, rlo <= rate && rate <= rhi);
        ok &= inside && rate_ok;
        let mark = |b: bool| if b { "ok" } else { "OUT" };
        detail.push(format!(
            "λ={lambda}: ln|ρ| {l:.2} vs [{lo:.2}, {hi:.2}] {}, rate {rate:.3} vs [{rlo:.3}, {rhi:.3}] {}",
            mark(inside),
            mark(rate_ok)
        ));
    }
    Ok((ok, detail.join("; ")))
}

/// The λ ∈ {6, 8, 10, 12} sweep with the h² ladder, shared by criteria 7, 8 and 12.
fn key_sweep() -> magsplit::Result<(Vec<SweepRow>, f64)> {
    let start = Instant::now();
    let cache = GroundStateCache::new(None);
    let rows: magsplit::Result<Vec<SweepRow>> =
        [6.0, 8.0, 10.0, 12.0].par_iter().map(|&l| sweep_point(&tight(l), &[11.0, 16.0, 22.0], &cache)).collect();
    Ok((rows?, start.elapsed().as_secs_f64()))
}

fn key_identity(rows: &[SweepRow], secs: f64) -> Outcome {
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let window = ratios.iter().all(|r| (0.5..=1.5).contains(r));
    let dev: Vec<f64> = ratios.iter().map(|r| (r - 1.0).abs()).collect();
    let inversions = dev.windows(2).filter(|w| w[1] > w[0]).count();
    let last = *dev.last().unwrap_or(&f64::INFINITY);
    let pass = window && inversions <= 1 && last <= 0.2 && secs <= 900.0;
    Ok((
        pass,
        format!("gap/(2|ρ|) = {ratios:.4?}, {inversions} inversion(s), final |ratio − 1| {last:.4} ≤ 0.2, sweep {secs:.0} s ≤ 900 s"),
    ))
}

fn reduction_consistency(rows: &[SweepRow]) -> Outcome {
    let mut ok = true;
    let mut rels = Vec::new();
    for (r, l) in rows.iter().zip([6.0, 8.0, 10.0, 12.0]) {
        let cfg = tight(l);
        let e0 = gs(l)?.e0.abs();
        if r.gap_planar > 10.0 * cfg.tolerances.eigen_rel * e0 {
            let rel = (r.gap_reduction - r.gap_planar).abs() / r.gap_planar;
            ok &= rel <= 0.05;
            rels.push(rel);
        }
    }
    let fg: Vec<f64> = rows.iter().map(|r| r.max_f.max(r.max_g)).collect();
    let decreasing = fg.windows(2).all(|w| w[1] < w[0]);
    let sci = |v: &[f64], p: usize| v.iter().map(|x| format!("{x:.p$e}")).collect::<Vec<_>>().join(", ");
    Ok((
        ok && decreasing && !rels.is_empty(),
        format!("gap rel diff [{}] ≤ 5e-2, max(|f|, |g|) = [{}] decreasing", sci(&rels, 1), sci(&fg, 2)),
    ))
}

fn ratio_bound() -> Outcome {
    let g = gs(10.0)?;
    let mut ok = true;
    let mut detail = Vec::new();
    for x in [2f64.sqrt(), 3f64.sqrt()] {
        let r = hopping_ratio_check(&g, 2.0, x)?;
        let bound = frozen::RATIO_K_STAR.ln() - 10.0 * (x * x - 1.0) * 4.0 / 8.0;
        ok &= r.log_ratio <= bound;
        detail.push(format!("x={x:.4}: ln ratio {:.3} ≤ {bound:.3}", r.log_ratio));
    }
    Ok((ok, detail.join("; ")))
}

/// Least-squares slope of ln φ_out against r² on n + 1 equispaced nodes in [lo, hi].
fn log_slope(g: &GroundState, lo: f64, hi: f64, n: usize) -> magsplit::Result<f64> {
    let mut pts = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let r = lo + (hi - lo) * k as f64 / n as f64;
        pts.push((r * r, g.log_phi_out(r)?));
    }
    let m = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / m, pts.iter().map(|p| p.1).sum::<f64>() / m);
    Ok(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>())
}

fn decay_sandwich() -> Outcome {
    let (a, top) = (0.5, 4.0);
    let mut inside = true;
    for lambda in [20.0, 40.0] {
        let g = gs(lambda)?;
        let b = decay_bounds(&g);
        for k in 1..=64 {
            let r = a + (top - a) * k as f64 / 64.0;
            let lp = g.log_phi_out(r)?;
            let lo = b.log_lower(r) + frozen::DECAY_LOWER_K.ln() - frozen::WINDOW.ln();
            let hi = b.log_upper(r) + frozen::DECAY_UPPER_K.ln() + frozen::WINDOW.ln();
            inside &= lo <= lp && lp <= hi;
        }
    }
    let slope = log_slope(&gs(40.0)?, a * (1.0 + 1e-9), top, 128)?;
    let rel = (slope / -10.0 - 1.0).abs();
    Ok((
        inside && rel <= 0.15,
        format!(
            "envelopes on (a, 2|d|] at λ ∈ {{20, 40}}: {}; fitted slope at λ=40 {slope:.3} vs −λ/4 = −10, off by {:.1}% (≤ 15%)",
            if inside { "inside" } else { "outside" },
            100.0 * rel
        ),
    ))
}

fn laplace_asymptote() -> Outcome {
    let g = gs(40.0)?;
    let mut worst: f64 = 0.0;
    for k in 0..=24 {
        let r = 0.5 * (1.5 + 1.5 * k as f64 / 24.0);
        worst = worst.max((laplace_exterior_asymptote(&g, r)? / evaluate_phi_out(&g, r)? - 1.0).abs());
    }
    Ok((worst <= 0.05, format!("max relative error {worst:.2e} ≤ 5e-2 on [1.5a, 3a]")))
}

fn resolvent(rows: &[SweepRow]) -> Outcome {
    let p = resolvent_probe(&tight(10.0), 0.0, Wells::Single)?;
    let rel = (p.probe * p.single_gap - 1.0).abs();
    let probes: Vec<f64> = rows.iter().filter(|r| r.lambda >= 8.0).map(|r| r.resolvent_probe).collect();
    let (lo, hi) = probes.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    Ok((
        rel <= 0.1 && probes.len() == 3 && hi <= 2.0 * lo,
        format!("single well probe·(e₁ − e₀) − 1 = {rel:.2e} ≤ 0.1; double well probe {probes:.4?} within ×2"),
    ))
}

fn main() {
    let start = Instant::now();
    let independent: Vec<Criterion> = vec![
        (1, "Landau level", landau_level),
        (2, "radial vs planar single well", radial_vs_planar),
        (3, "three hopping routes", three_routes),
        (4, "kernel positivity", kernel_positivity),
        (5, "Bessel ring identity", ring_identity),
        (6, "hopping sandwich", hopping_sandwich),
        (9, "ratio bound", ratio_bound),
        (10, "Gaussian decay sandwich and slope", decay_sandwich),
        (11, "Laplace asymptote", laplace_asymptote),
    ];
    let (sweep, mut results) =
        rayon::join(key_sweep, || independent.par_iter().map(|(n, name, f)| (*n, name.to_string(), f())).collect::<Vec<_>>());
    match sweep {
        Ok((rows, secs)) => {
            results.push((7, "key identity".into(), key_identity(&rows, secs)));
            results.push((8, "reduction consistency".into(), reduction_consistency(&rows)));
            results.push((12, "resolvent probe".into(), resolvent(&rows)));
        }
        Err(e) => {
            for (n, name) in [(7, "key identity"), (8, "reduction consistency"), (12, "resolvent probe")] {
                results.push((n, name.into(), Ok((false, format!("sweep error: {e}")))));
            }
        }
    }
    results.sort_by_key(|r| r.0);
    let mut failed = 0;
    for (n, name, outcome) in &results {
        let (pass, detail) = match outcome {
            Ok((p, d)) => (*p, d.clone()),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!("[{}] {n:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
    println!("{} of {} criteria passed in {:.0} s", results.len() - failed, results.len(), start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
