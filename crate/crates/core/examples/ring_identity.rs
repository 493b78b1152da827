//! ∫₀^{2π} e^{iξ sinθ + β cosθ} dθ against 2π I₀(√(β² − ξ²)).
use magsplit::specfun::{bessel_i0_scaled, ring_phase_integral};

fn main() -> magsplit::Result<()> {
    for (xi, beta) in [(0.0f64, 0.0f64), (0.0, 1.0), (1.0, 2.0), (3.0, 3.5), (10.0, 40.0), (49.0, 50.0)] {
        let z = (beta * beta - xi * xi).sqrt();
        let closed = 2.0 * std::f64::consts::PI * z.exp() * bessel_i0_scaled(z)?;
        let lhs = ring_phase_integral(xi, beta)?;
        println!("ξ={xi:>5} β={beta:>5}  integral={lhs:.15e}  closed={closed:.15e}  rel={:.1e}", (lhs / closed - 1.0).abs());
    }
    Ok(())
}
