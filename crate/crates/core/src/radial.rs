//! Radial ground state of the single disc well, h = (P − λAx)² + λ²v₀.
//!
//! With y = λr²/2 and φ = e^{−y/2}ψ(y), ψ solves Kummer's equation. Inside the
//! disc ψ ∝ M(α_in, 1; y), outside ψ ∝ W(α, y) = Γ(α)U(α, 1, y).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hopping::laplace_tstar;
use crate::model::ModelConfig;
use crate::specfun::{self, kummer_series, quad, tricomi_w_log, LogValue};

const SAMPLES: usize = 513;
const W_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundState {
    pub e0: f64,
    /// α = (λ − e₀)/(2λ)
    pub alpha: f64,
    /// ν = α/λ
    pub nu: f64,
    pub c_lambda: f64,
    pub log_c_lambda: f64,
    /// Kummer parameter inside the well.
    pub alpha_in: f64,
    /// ln A with φ = A e^{−y/2} M(α_in, 1; y) for r ≤ a.
    pub log_amp_in: f64,
    /// Log-derivative mismatch at r = a.
    pub match_residual: f64,
    /// |‖φ‖² − 1| recomputed from the samples and the exterior form.
    pub norm_error: f64,
    /// (r, φ(r)) on [0, a].
    pub interior_samples: Vec<(f64, f64)>,
    pub config: ModelConfig,
}

impl GroundState {
    pub fn lambda(&self) -> f64 {
        self.config.lambda
    }

    pub fn radius(&self) -> f64 {
        self.config.well.radius
    }

    pub fn depth(&self) -> f64 {
        self.config.well.depth
    }

    /// V ≡ 0: φ is the lowest Landau state, proportional to e^{−λr²/4}.
    pub fn is_free(&self) -> bool {
        self.config.well.depth == 0.0
    }

    /// ln φ(r) inside the disc.
    pub fn log_phi_in(&self, r: f64) -> Result<LogValue> {
        let y = 0.5 * self.lambda() * r * r;
        let (m, _) = kummer_series(self.alpha_in, 1.0, y)?;
        Ok(LogValue { log_magnitude: m.log_magnitude + self.log_amp_in - 0.5 * y, sign: m.sign })
    }

    /// ln φ(r) outside the disc.
    pub fn log_phi_out(&self, r: f64) -> Result<f64> {
        let y = 0.5 * self.lambda() * r * r;
        if self.is_free() {
            return Ok(self.log_c_lambda - 0.5 * y);
        }
        Ok(self.log_c_lambda - 0.5 * y + tricomi_w_log(self.alpha, y, 0.0, W_TOL)?)
    }

    /// φ(r) for any r ≥ 0.
    pub fn phi(&self, r: f64) -> Result<f64> {
        if r <= self.radius() && !self.is_free() {
            Ok(self.log_phi_in(r)?.value())
        } else {
            Ok(self.log_phi_out(r)?.exp())
        }
    }
}

fn check_radial_config(cfg: &ModelConfig) -> Result<()> {
    let w = &cfg.well;
    if !(cfg.lambda > 0.0 && cfg.lambda.is_finite()) {
        return Err(Error::InvalidConfig(format!("lambda must be > 0 (got {})", cfg.lambda)));
    }
    if !(w.depth <= 0.0 && w.depth.is_finite()) || !(w.radius > 0.0 && w.radius.is_finite()) {
        return Err(Error::InvalidConfig(format!("need depth ≤ 0 and radius > 0 (got {}, {})", w.depth, w.radius)));
    }
    if (cfg.b() - cfg.lambda).abs() > 1e-12 * cfg.lambda {
        return Err(Error::InvalidConfig("the radial solution assumes b = λ".into()));
    }
    Ok(())
}

/// Mismatch of logarithmic derivatives at y_a, scaled so it has no poles:
/// (M′W − MW′)/(√(M² + M′²)·W).
struct Matcher {
    lambda: f64,
    depth: f64,
    ya: f64,
}

impl Matcher {
    fn alphas(&self, e: f64) -> (f64, f64) {
        let l = self.lambda;
        ((l - e) / (2.0 * l), (l - (e - l * l * self.depth)) / (2.0 * l))
    }

    fn mismatch(&self, e: f64) -> Result<f64> {
        let (alpha, alpha_in) = self.alphas(e);
        let (m, _) = kummer_series(alpha_in, 1.0, self.ya)?;
        let (m2, _) = kummer_series(alpha_in + 1.0, 2.0, self.ya)?;
        let mp = m2.mul(&LogValue::from_f64(alpha_in));
        let scale = m.log_magnitude.max(mp.log_magnitude);
        let mv = m.signum() * (m.log_magnitude - scale).exp();
        let mpv = mp.signum() * (mp.log_magnitude - scale).exp();
        let w_ratio = -(tricomi_w_log(alpha, self.ya, 1.0, W_TOL)? - tricomi_w_log(alpha, self.ya, 0.0, W_TOL)?).exp();
        Ok((mpv - mv * w_ratio) / (mv * mv + mpv * mpv).sqrt())
    }
}

/// Ground state by bracketing the lowest root of the matching condition on
/// (λ²·depth, λ), then fixing C_λ from ‖φ‖ = 1.
pub fn solve_ground_state(cfg: &ModelConfig) -> Result<GroundState> {
    check_radial_config(cfg)?;
    let lambda = cfg.lambda;
    let a = cfg.well.radius;
    let depth = cfg.well.depth;
    if depth == 0.0 {
        return Ok(free_ground_state(cfg));
    }
    let ya = 0.5 * lambda * a * a;
    let matcher = Matcher { lambda, depth, ya };
    let lo = lambda * lambda * depth;
    let hi = lambda;
    let range = hi - lo;
    let panels = ((range / (0.5 * lambda)).ceil() as usize).max(64);
    let at = |k: usize| if k == 0 { lo + 1e-12 * range } else { lo + range * k as f64 / panels as f64 };

    let mut bracket = None;
    let mut f_prev = matcher.mismatch(at(0))?;
    for k in 1..panels {
        let f = matcher.mismatch(at(k))?;
        if f_prev > 0.0 && f <= 0.0 {
            bracket = Some((at(k - 1), at(k)));
            break;
        }
        f_prev = f;
    }
    let (mut el, mut eh) = bracket.ok_or(Error::NoBoundState { lo, hi })?;
    let max_it = cfg.tolerances.max_iterations.bisection;
    let mut it = 0;
    while eh - el > 4.0 * f64::EPSILON * el.abs().max(1.0) {
        let mid = 0.5 * (el + eh);
        if mid <= el || mid >= eh {
            break;
        }
        if matcher.mismatch(mid)? > 0.0 {
            el = mid;
        } else {
            eh = mid;
        }
        it += 1;
        if it >= max_it {
            return Err(Error::conv("ground-state bisection", format!("bracket [{el}, {eh}] after {it} steps")));
        }
    }
    let (fl, fh) = (matcher.mismatch(el)?, matcher.mismatch(eh)?);
    let e0 = if fl != fh { (el * fh - eh * fl) / (fh - fl) } else { 0.5 * (el + eh) };
    let e0 = e0.clamp(el, eh);
    let residual = matcher.mismatch(e0)?.abs().min(fl.abs()).min(fh.abs());
    if residual > cfg.tolerances.match_rel {
        return Err(Error::conv("ground-state matching", format!("residual {residual:.3e} at e = {e0}")));
    }
    let (alpha, alpha_in) = matcher.alphas(e0);

    // ‖φ‖² = (2π/λ) A² M(y_a)² [∫₀^{y_a} e^{−y}(M/M(y_a))² dy + e^{−y_a} ∫₀^∞ e^{−u}(W(y_a+u)/W(y_a))² du]
    let tol = cfg.tolerances.quadrature_rel.min(1e-11);
    let caps = cfg.tolerances.max_iterations.quadrature_intervals;
    let (m_a, _) = kummer_series(alpha_in, 1.0, ya)?;
    let inner = quad::adaptive(
        |y| {
            let m = kummer_series(alpha_in, 1.0, y).map(|(m, _)| m.signum() * (m.log_magnitude - m_a.log_magnitude).exp());
            m.map(|m| m * m * (-y).exp()).unwrap_or(f64::NAN)
        },
        0.0,
        ya,
        tol,
        0.0,
        caps,
    )?;
    let lw_a = tricomi_w_log(alpha, ya, 0.0, W_TOL)?;
    let outer = quad::adaptive(
        |u| tricomi_w_log(alpha, ya + u, 0.0, W_TOL).map(|lw| (2.0 * (lw - lw_a) - u).exp()).unwrap_or(f64::NAN),
        0.0,
        50.0,
        tol,
        0.0,
        caps,
    )?;
    let total = inner.value + (-ya).exp() * outer.value;
    let log_amp_in = -0.5 * (2.0 * PI / lambda * total).ln() - m_a.log_magnitude;
    let log_c_lambda = log_amp_in + m_a.log_magnitude - lw_a;

    let mut gs = GroundState {
        e0,
        alpha,
        nu: alpha / lambda,
        c_lambda: log_c_lambda.exp(),
        log_c_lambda,
        alpha_in,
        log_amp_in,
        match_residual: residual,
        norm_error: f64::NAN,
        interior_samples: Vec::new(),
        config: cfg.clone(),
    };
    let mut samples = Vec::with_capacity(SAMPLES);
    for i in 0..SAMPLES {
        let r = a * i as f64 / (SAMPLES - 1) as f64;
        let v = gs.log_phi_in(r)?;
        if v.sign != specfun::Sign::Plus {
            return Err(Error::Consistency(format!("ground state not positive at r = {r}")));
        }
        samples.push((r, v.value()));
    }
    gs.interior_samples = samples;
    gs.norm_error =
        (sample_norm(&gs, (-ya).exp() * outer.value * (2.0 * PI / lambda) * (log_amp_in + m_a.log_magnitude).exp().powi(2)) - 1.0).abs();
    Ok(gs)
}

/// ‖φ‖² with the interior by Simpson's rule on the stored samples.
fn sample_norm(gs: &GroundState, exterior: f64) -> f64 {
    2.0 * PI * simpson(&gs.interior_samples, |r, p| p * p * r) + exterior
}

pub(crate) fn simpson(samples: &[(f64, f64)], f: impl Fn(f64, f64) -> f64) -> f64 {
    let n = samples.len() - 1;
    debug_assert!(n.is_multiple_of(2));
    let h = (samples[n].0 - samples[0].0) / n as f64;
    let mut s = f(samples[0].0, samples[0].1) + f(samples[n].0, samples[n].1);
    for (i, &(r, p)) in samples.iter().enumerate().take(n).skip(1) {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(r, p);
    }
    s * h / 3.0
}

fn free_ground_state(cfg: &ModelConfig) -> GroundState {
    let lambda = cfg.lambda;
    let a = cfg.well.radius;
    // φ = √(λ/2π) e^{−λr²/4}
    let log_amp = 0.5 * (lambda / (2.0 * PI)).ln();
    let samples = (0..SAMPLES)
        .map(|i| {
            let r = a * i as f64 / (SAMPLES - 1) as f64;
            (r, (log_amp - 0.25 * lambda * r * r).exp())
        })
        .collect();
    GroundState {
        e0: lambda,
        alpha: 0.0,
        nu: 0.0,
        c_lambda: log_amp.exp(),
        log_c_lambda: log_amp,
        alpha_in: 0.0,
        log_amp_in: log_amp,
        match_residual: 0.0,
        norm_error: 0.0,
        interior_samples: samples,
        config: cfg.clone(),
    }
}

/// C_λ e^{−λr²/4} W(α, λr²/2) for r > a.
pub fn evaluate_phi_out(gs: &GroundState, r: f64) -> Result<f64> {
    if !(r > gs.radius()) {
        return Err(Error::Domain(format!("evaluate_phi_out needs r > a = {}, got {r}", gs.radius())));
    }
    Ok(gs.log_phi_out(r)?.exp())
}

/// Gaussian envelopes for φ outside the disc, prefactors set to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayBounds {
    pub mu0: f64,
    pub mu1: f64,
    pub lambda: f64,
    pub radius: f64,
}

impl DecayBounds {
    /// ln[λ^{−1} exp(−(¼+μ₀)λ((r²−a²)+μ₁))]
    pub fn log_lower(&self, r: f64) -> f64 {
        let (l, a) = (self.lambda, self.radius);
        -l.ln() - (0.25 + self.mu0) * l * ((r * r - a * a) + self.mu1)
    }

    /// ln[√λ exp(−λ(r²−a²)/4)]
    pub fn log_upper(&self, r: f64) -> f64 {
        let (l, a) = (self.lambda, self.radius);
        0.5 * l.ln() - 0.25 * l * (r * r - a * a)
    }

    pub fn lower(&self, r: f64) -> f64 {
        self.log_lower(r).exp()
    }

    pub fn upper(&self, r: f64) -> f64 {
        self.log_upper(r).exp()
    }
}

/// μ₀ = 2(|v|/2)^{3/4}a^{−3/2}; μ₁ = ½a(¼(a−2)² + 2|v|)/(¼ + μ₀) + a².
pub fn decay_bounds(gs: &GroundState) -> DecayBounds {
    let a = gs.radius();
    let v = gs.depth().abs();
    let mu0 = 2.0 * (v / 2.0).powf(0.75) * a.powf(-1.5);
    let mu1 = 0.5 * a * (0.25 * (a - 2.0).powi(2) + 2.0 * v) / (0.25 + mu0) + a * a;
    DecayBounds { mu0, mu1, lambda: gs.lambda(), radius: a }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    /// ∫₀^a φ(r)(−v₀(r)) r dr
    pub value: f64,
    /// max φ on the disc
    pub sup_norm: f64,
    /// sup_norm / λ²
    pub sup_over_lambda_sq: f64,
}

pub fn overlap_well_integral(gs: &GroundState) -> Result<OverlapReport> {
    let depth = gs.depth();
    let value = simpson(&gs.interior_samples, |r, p| p * (-depth) * r);
    let sup_norm = gs.interior_samples.iter().map(|s| s.1).fold(0.0, f64::max);
    if depth < 0.0 && !(value > 0.0) {
        return Err(Error::Consistency(format!("overlap integral {value} is not positive")));
    }
    Ok(OverlapReport { value, sup_norm, sup_over_lambda_sq: sup_norm / gs.lambda().powi(2) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationBracket {
    pub tstar_a: f64,
    /// ln of the closed-form upper bound on C_λ.
    pub log_upper: f64,
    /// ln of λ^{−1/2} exp(−λa(¼(a−2)² + 2|v|)/2).
    pub log_lower_shape: f64,
    pub log_c_lambda: f64,
}

/// q(r) = ¼(1+2t★)r² + ν ln(1 + 1/t★), the Laplace exponent.
pub fn laplace_q(nu: f64, r: f64) -> f64 {
    let t = laplace_tstar(nu, r);
    0.25 * (1.0 + 2.0 * t) * r * r + nu * (1.0 / t).ln_1p()
}

pub fn normalization_bracket(gs: &GroundState) -> Result<NormalizationBracket> {
    if !(gs.nu > 0.0) {
        return Err(Error::Domain("normalization bracket needs ν > 0".into()));
    }
    let (l, a, nu) = (gs.lambda(), gs.radius(), gs.nu);
    let t = laplace_tstar(nu, a);
    let qprime = a * (0.5 + t);
    let fac = 2.0 * PI * a / (nu * qprime) * (1.0 + t * t / (1.0 + 2.0 * t));
    let log_upper = l.ln() - 0.5 * fac.ln() + l * laplace_q(nu, a);
    let v = gs.depth().abs();
    let log_lower_shape = -0.5 * l.ln() - 0.5 * l * a * (0.25 * (a - 2.0).powi(2) + 2.0 * v);
    Ok(NormalizationBracket { tstar_a: t, log_upper, log_lower_shape, log_c_lambda: gs.log_c_lambda })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference(lambda: f64) -> GroundState {
        solve_ground_state(&ModelConfig::reference(lambda, -2.0, 0.5, 2.0)).unwrap()
    }

    #[test]
    fn free_case_is_first_landau_level() {
        let gs = solve_ground_state(&ModelConfig::reference(10.0, 0.0, 0.5, 2.0)).unwrap();
        assert_eq!(gs.e0, 10.0);
        assert_eq!(gs.alpha, 0.0);
        // ∫ φ² = 1 for φ = √(λ/2π)e^{−λr²/4}
        let n = 2.0 * PI * gs.c_lambda.powi(2) / gs.lambda();
        assert!((n - 1.0).abs() < 1e-14);
    }

    #[test]
    fn binding_energy_window() {
        let gs = reference(10.0);
        let shifted = gs.e0 + 2.0 * 100.0;
        assert!(shifted > 0.0 && shifted < 3.0 * 10.0, "{}", gs.e0);
        assert!(gs.match_residual <= 1e-10);
        assert!(gs.norm_error <= 1e-8, "{}", gs.norm_error);
        assert!(gs.alpha > 0.0 && gs.nu > 0.0 && gs.nu <= 2.0);
    }

    #[test]
    fn interior_and_exterior_meet() {
        let gs = reference(10.0);
        let a = gs.radius();
        let inside = gs.interior_samples.last().unwrap().1;
        let outside = evaluate_phi_out(&gs, a * (1.0 + 1e-12)).unwrap();
        assert!((inside - outside).abs() <= 1e-9 * inside);
        assert!(evaluate_phi_out(&gs, a).is_err());
        assert!(evaluate_phi_out(&gs, 2.0 * a).unwrap() > evaluate_phi_out(&gs, 3.0 * a).unwrap());
    }

    #[test]
    fn mu0_closed_form() {
        let b = decay_bounds(&reference(10.0));
        assert!((b.mu0 - 5.656_854_249_492_38).abs() < 1e-12);
        for i in 0..40 {
            let r = 0.5 * (16.0f64).powf((i as f64 + 0.5) / 40.0);
            assert!(b.lower(r) <= b.upper(r));
        }
    }

    #[test]
    fn overlap_positive_and_free_zero() {
        assert!(overlap_well_integral(&reference(10.0)).unwrap().value > 0.0);
        let free = solve_ground_state(&ModelConfig::reference(10.0, 0.0, 0.5, 2.0)).unwrap();
        assert_eq!(overlap_well_integral(&free).unwrap().value, 0.0);
    }
}
