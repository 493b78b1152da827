//! Lowest eigenvalue with no wells against the first Landau level λ.
use magsplit::model::ModelConfig;
use magsplit::planar::{build_hamiltonian, default_shift, lowest_eigenpairs, Wells};

fn main() -> magsplit::Result<()> {
    let mut cfg = ModelConfig::reference(10.0, -2.0, 0.5, 2.0);
    // a single vector of the degenerate lowest level converges only this far
    cfg.tolerances.eigen_rel = 1e-6;
    let op = build_hamiltonian(&cfg, Wells::None)?;
    let t = std::time::Instant::now();
    let eig = lowest_eigenpairs(&op, 1, default_shift(&cfg, Wells::None)?)?;
    let e = eig.eigenvalues[0];
    println!(
        "sites={} h={:.5} E0={e:.6} |E0/λ−1|={:.3e} outer={} inner={} ({:.2?})",
        op.dimension(),
        op.grid.h,
        (e / cfg.lambda - 1.0).abs(),
        eig.outer_iterations,
        eig.inner_iterations,
        t.elapsed()
    );
    Ok(())
}
