//! Radial ground state for a few couplings: e₀, α, ν, C_λ and the matching residual.
use magsplit::model::ModelConfig;
use magsplit::radial::solve_ground_state;

fn main() -> magsplit::Result<()> {
    for lambda in [4.0, 6.0, 10.0, 20.0, 40.0] {
        let gs = solve_ground_state(&ModelConfig::reference(lambda, -2.0, 0.5, 2.0))?;
        println!(
            "λ={lambda:>4} e0={:.10} α={:.6} ν={:.6} C_λ={:.6e} match={:.1e} norm={:.1e} φ(a)={:.6e}",
            gs.e0,
            gs.alpha,
            gs.nu,
            gs.c_lambda,
            gs.match_residual,
            gs.norm_error,
            gs.phi(0.5)?
        );
    }
    Ok(())
}
