//! Magnetic translate of the discrete single-well ground state is the
//! ground state of the shifted well: compare residuals with and without the gauge factor.
use magsplit::linalg::{axpy, norm, C64};
use magsplit::model::ModelConfig;
use magsplit::planar::{build_with_depths, lowest_eigenpairs, magnetic_translate_by, Wells};

fn main() -> magsplit::Result<()> {
    let mut cfg = ModelConfig::reference(8.0, -2.0, 0.5, 2.0);
    cfg.tolerances.eigen_rel = 1e-13;
    let left = build_with_depths(&cfg, cfg.well.depth, 0.0, Wells::Single)?;
    let right = build_with_depths(&cfg, 0.0, cfg.well.depth, Wells::Single)?;
    let eig = lowest_eigenpairs(&left, 1, cfg.well.depth * cfg.lambda * cfg.lambda)?;
    let (e0, phi0) = (eig.eigenvalues[0], &eig.eigenvectors[0]);
    let residual = |v: &[C64]| {
        let mut hv = vec![C64::new(0.0, 0.0); v.len()];
        right.apply(v, &mut hv);
        axpy(C64::new(-e0, 0.0), v, &mut hv);
        norm(&hv) / norm(v)
    };
    let with_phase = magnetic_translate_by(phi0, &left.grid, cfg.b(), cfg.separation)?;
    let plain = magnetic_translate_by(phi0, &left.grid, 0.0, cfg.separation)?;
    println!("e0={e0:.10}");
    println!("‖(H_d − e0)R φ0‖ with gauge factor: {:.3e}", residual(&with_phase));
    println!("‖(H_d − e0)T φ0‖ plain shift:       {:.3e}", residual(&plain));
    Ok(())
}
