//! ln φ outside the well against the Gaussian envelopes and the Laplace form.
use magsplit::hopping::laplace_exterior_asymptote;
use magsplit::model::ModelConfig;
use magsplit::radial::{decay_bounds, solve_ground_state};

fn main() -> magsplit::Result<()> {
    let lambda = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(40.0);
    let gs = solve_ground_state(&ModelConfig::reference(lambda, -2.0, 0.5, 2.0))?;
    let b = decay_bounds(&gs);
    println!("λ={lambda} μ0={:.4} μ1={:.4}", b.mu0, b.mu1);
    println!("{:>7} {:>12} {:>12} {:>12} {:>12}", "r", "ln φ", "ln lower", "ln upper", "ln laplace");
    for k in 1..=14 {
        let r = 0.5 + 0.25 * k as f64;
        let laplace = laplace_exterior_asymptote(&gs, r).map(f64::ln).unwrap_or(f64::NAN);
        println!("{r:>7.3} {:>12.4} {:>12.4} {:>12.4} {laplace:>12.4}", gs.log_phi_out(r)?, b.log_lower(r), b.log_upper(r));
    }
    Ok(())
}
