//! Measures the constants committed in `magsplit::frozen` at the reference
//! configuration (λ = 10, depth −2, a = 0.5, |d| = 2).
use magsplit::hopping::{hopping_all_routes, kernel_bessel_log, log_abs_rho};
use magsplit::model::ModelConfig;
use magsplit::radial::{decay_bounds, normalization_bracket, overlap_well_integral, solve_ground_state};
use magsplit::specfun::bessel_i0_scaled;

fn main() -> magsplit::Result<()> {
    let (lambda, dist) = (10.0, 2.0);
    let gs = solve_ground_state(&ModelConfig::reference(lambda, -2.0, 0.5, dist))?;
    let a = gs.radius();
    let b = decay_bounds(&gs);
    let (mut up, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 1..=200 {
        let r = a + (2.0 * dist - a) * i as f64 / 200.0;
        let lp = gs.log_phi_out(r)?;
        up = up.max(lp - b.log_upper(r));
        lo = lo.min(lp - b.log_lower(r));
    }
    println!("DECAY_UPPER_K = {:.6e}\nDECAY_LOWER_K = {:.6e}", up.exp(), lo.exp());
    let nb = normalization_bracket(&gs)?;
    println!("CLAMBDA_UPPER_K = {:.6e}", (gs.log_c_lambda - nb.log_upper).exp());
    println!("CLAMBDA_LOWER_K = {:.6e}", (gs.log_c_lambda - nb.log_lower_shape).exp());
    let h = hopping_all_routes(&gs, dist)?;
    println!("HOP_UPPER_K = {:.6e}", (h.log_abs_bessel - h.log_upper).exp());
    println!("HOP_LOWER_K = {:.6e}", (h.log_abs_bessel - h.log_lower).exp());
    println!("SUP_NORM_K = {:.6e}", overlap_well_integral(&gs)?.sup_over_lambda_sq);
    let (mut c1, mut c2) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..=4000 {
        let z = if i == 0 { 0.0 } else { 10f64.powf(-6.0 + 12.0 * i as f64 / 4000.0) };
        let v = bessel_i0_scaled(z)? * ((2.0 * std::f64::consts::PI * z).sqrt() + 1.0);
        c1 = c1.min(v);
        c2 = c2.max(v);
    }
    println!("I0_BRACKET = ({c1:.6}, {c2:.6})  C2/C1 = {:.6}", c2 / c1);
    for x in [2f64.sqrt(), 3f64.sqrt()] {
        let lr = log_abs_rho(&gs, x * dist)? - log_abs_rho(&gs, dist)?;
        let k = (lr + lambda * (x * x - 1.0) * dist * dist / 8.0).exp();
        let mut km: f64 = 0.0;
        for i in 1..=16 {
            let r = a * i as f64 / 16.0;
            let tl = |d: f64| kernel_bessel_log(&gs, d, r).map(|v| v + lambda * (r * r + d * d) / 8.0);
            km = km.max((tl(x * dist)? - tl(dist)?).exp());
        }
        println!("x={x:.4}: ratio·e^(λ(x²−1)d²/8) = {k:.6e}; max kernel ratio = {km:.6e}");
    }
    Ok(())
}
