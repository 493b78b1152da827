//! Two lowest eigenvalues from the 2×2 Schur-complement reduction, with the
//! f/g smallness diagnostics and the resolvent probe.
use magsplit::model::ModelConfig;
use magsplit::planar::Wells;
use magsplit::reduction::{resolvent_probe, splitting_from_reduction};

fn main() -> magsplit::Result<()> {
    let lambda = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10.0);
    let mut cfg = ModelConfig::reference(lambda, -2.0, 0.5, 2.0);
    cfg.tolerances.eigen_rel = 1e-13;
    let t = std::time::Instant::now();
    let rep = splitting_from_reduction(&cfg)?;
    println!("{}", serde_json::to_string_pretty(&rep)?);
    println!("({:.1?})", t.elapsed());
    for wells in [Wells::Single, Wells::Double] {
        let p = resolvent_probe(&cfg, 0.0, wells)?;
        println!("probe {wells:?}: {:.6} vs 1/(e1−e0) = {:.6} ({} steps)", p.probe, 1.0 / p.single_gap, p.iterations);
    }
    println!("({:.1?})", t.elapsed());
    Ok(())
}
