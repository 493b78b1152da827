//! E₁ − E₀ of the double well against 2|ρ|, on one grid and extrapolated in h².
use magsplit::model::ModelConfig;
use magsplit::planar::{splitting, splitting_extrapolated};

fn main() -> magsplit::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let lambda = args.first().copied().unwrap_or(8.0);
    let mut cfg = ModelConfig::reference(lambda, -2.0, 0.5, 2.0);
    cfg.tolerances.eigen_rel = 1e-13;
    let t = std::time::Instant::now();
    let rep = splitting(&cfg)?;
    println!(
        "λ={lambda} h={:.5} E0={:.10} gap={:.6e} 2|ρ|={:.6e} ratio={:.5} resolved={} ({:.1?})",
        rep.spacing,
        rep.e0,
        rep.gap,
        2.0 * rep.rho_abs,
        rep.ratio,
        rep.resolved,
        t.elapsed()
    );
    if args.len() > 1 {
        let ex = splitting_extrapolated(&cfg, &args[1..])?;
        for l in &ex.levels {
            println!("  h={:.5} gap={:.8e} ratio={:.5}", l.spacing, l.gap, l.ratio);
        }
        println!("  extrapolated ratio={:.5} ({:.1?})", ex.ratio, t.elapsed());
    }
    Ok(())
}
