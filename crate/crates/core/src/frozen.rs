//! Prefactors hidden behind "≲" in the closed-form bounds.
//!
//! Each K is the ratio value/envelope measured once at λ = 10, depth −2,
//! a = 0.5, |d| = 2 (`cargo run --example measure_prefactors` prints them).
//! Checks then allow a factor WINDOW of slack on the side the bound constrains.

/// Slack factor applied to every frozen prefactor.
pub const WINDOW: f64 = 10.0;

/// max over r ∈ (a, 2|d|] of φ(r)/upper(r).
pub const DECAY_UPPER_K: f64 = 7.618e-2;
/// min over r ∈ (a, 2|d|] of φ(r)/lower(r).
pub const DECAY_LOWER_K: f64 = 1.536e12;
/// C_λ / closed-form upper bound.
pub const CLAMBDA_UPPER_K: f64 = 5.643e-2;
/// C_λ / lower-bound shape.
pub const CLAMBDA_LOWER_K: f64 = 7.737e7;
/// |ρ| / upper envelope.
pub const HOP_UPPER_K: f64 = 3.987e-8;
/// |ρ| / lower envelope.
pub const HOP_LOWER_K: f64 = 4.928e8;
/// c in the exponent-rate slack c·ln λ/λ: the λ^{5/2} prefactor of the upper
/// envelope contributes 10 ln λ/λ to the rate.
pub const RATE_SLACK_C: f64 = 10.0;
/// sup φ on the disc / λ².
pub const SUP_NORM_K: f64 = 1.948e-2;
/// [C₁, C₂] bracketing e^{−z}I₀(z)(√(2πz) + 1) over z ≥ 0 (inf at z = 0).
pub const I0_BRACKET: (f64, f64) = (1.0, 1.804114);
/// K★ in |ρ(xδ)/ρ(δ)| ≤ K★ e^{−λ(x²−1)δ²/8}, taken as C₂/C₁.
pub const RATIO_K_STAR: f64 = I0_BRACKET.1 / I0_BRACKET.0;
/// C★ in L̃_{δ'}(r) ≤ C★ L̃_δ(r) for δ' ≥ δ, taken as C₂/C₁.
pub const KERNEL_C_STAR: f64 = I0_BRACKET.1 / I0_BRACKET.0;

/// K_lo·lower/WINDOW ≤ value ≤ WINDOW·K_up·upper, all in logs.
pub fn within_window(log_value: f64, log_lower: f64, log_upper: f64, k_lo: f64, k_up: f64) -> bool {
    log_value >= log_lower + k_lo.ln() - WINDOW.ln() && log_value <= log_upper + k_up.ln() + WINDOW.ln()
}
/// Floor on the single-well e₁ − e₀: min over λ ∈ {6, 8, 10, 12} measured
/// at 16.50 (λ = 6), divided by WINDOW.
pub const SINGLE_GAP_FLOOR: f64 = 1.650;
