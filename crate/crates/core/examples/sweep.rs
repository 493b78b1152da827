//! The diagnostics table over λ on one grid, as the `sweep` subcommand
//! prints it (without the spacing ladder).
use magsplit::cli::{sweep_checks, sweep_point, GroundStateCache, SweepConfig};
use magsplit::model::ModelConfig;

fn main() -> magsplit::Result<()> {
    let mut base = ModelConfig::reference(10.0, -2.0, 0.5, 2.0);
    base.tolerances.eigen_rel = 1e-13;
    let sweep = SweepConfig { base, lambdas: vec![6.0, 8.0, 10.0], separations: vec![], ladder: vec![] };
    let cache = GroundStateCache::new(None);
    let mut rows = Vec::new();
    println!(
        "{:>5} {:>12} {:>12} {:>12} {:>8} {:>10} {:>10} {:>8}",
        "λ", "|ρ|", "gap_planar", "gap_red", "ratio", "max|f|", "max|g|", "probe"
    );
    for p in sweep.points() {
        let r = sweep_point(&p, &sweep.ladder, &cache)?;
        println!(
            "{:>5} {:>12.4e} {:>12.4e} {:>12.4e} {:>8.4} {:>10.2e} {:>10.2e} {:>8.4}",
            r.lambda, r.rho_abs, r.gap_planar, r.gap_reduction, r.ratio, r.max_f, r.max_g, r.resolvent_probe
        );
        rows.push(r);
    }
    for c in sweep_checks(&rows) {
        println!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
    Ok(())
}
