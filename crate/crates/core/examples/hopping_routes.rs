//! ρ(d) by the three routes, with the closed-form envelopes.
use magsplit::hopping::hopping_all_routes;
use magsplit::model::ModelConfig;
use magsplit::radial::solve_ground_state;

fn main() -> magsplit::Result<()> {
    let dist = 2.0;
    for lambda in [6.0, 8.0, 10.0, 12.0] {
        let gs = solve_ground_state(&ModelConfig::reference(lambda, -2.0, 0.5, dist))?;
        let h = hopping_all_routes(&gs, dist)?;
        println!(
            "λ={lambda:>4} e0={:.6} C={:.5e} ν={:.5} ρ_bessel={:.6e} ρ_angular={:.6e} ρ_direct={:.6e} (im {:.1e}) spread={:.1e} bracket=[{:.3e}, {:.3e}]",
            gs.e0,
            gs.c_lambda,
            gs.nu,
            h.rho_bessel,
            h.rho_angular.unwrap_or(f64::NAN),
            h.rho_direct.map(|z| z.re).unwrap_or(f64::NAN),
            h.rho_direct.map(|z| z.im).unwrap_or(f64::NAN),
            h.route_disagreement(),
            h.lower_bound,
            h.upper_bound,
        );
    }
    Ok(())
}
