//! The hopping coefficient ρ(d) = ⟨φ₀, λ²v₀ φ_d⟩ and its bounds.
//!
//! With d = δe₁ everything reduces to ρ = λ²∫₀^a φ(r)v₀(r)L_δ(r) dr where
//! L_δ(r) = r∫₀^{2π} e^{iλδr sinθ/2} φ(|x − d|) dθ. The angular integral is
//! taken two ways: by trapezoid directly, and after the ring identity as a
//! positive integral against I₀.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frozen;
use crate::radial::{decay_bounds, laplace_q, overlap_well_integral, GroundState};
use crate::specfun::{i0e, quad, softplus};

const KERNEL_TOL: f64 = 1e-12;
const RHO_TOL: f64 = 1e-11;

fn check_dist(gs: &GroundState, dist: f64) -> Result<()> {
    let a = gs.radius();
    if !(dist > 2.0 * a && dist.is_finite()) {
        return Err(Error::Domain(format!("distance {dist} must exceed 2a = {}", 2.0 * a)));
    }
    Ok(())
}

fn check_r(gs: &GroundState, r: f64) -> Result<()> {
    if !(r >= 0.0 && r <= gs.radius()) {
        return Err(Error::Domain(format!("kernel radius {r} outside [0, {}]", gs.radius())));
    }
    Ok(())
}

/// ln L_δ(r) from the non-oscillatory representation
/// 2πC_λ r e^{−Y/2} ∫₀^∞ e^{−Yt} t^{α−1}(1+t)^{−α} I₀(λδr√(t(t+1))) dt, Y = λ(r²+δ²)/2.
pub fn kernel_bessel_log(gs: &GroundState, dist: f64, r: f64) -> Result<f64> {
    check_dist(gs, dist)?;
    check_r(gs, r)?;
    if r == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let lambda = gs.lambda();
    let y = 0.5 * lambda * (r * r + dist * dist);
    let prefix = (2.0 * PI).ln() + gs.log_c_lambda + r.ln() - 0.5 * y;
    if gs.is_free() {
        // φ ∝ e^{−λ|x|²/4}: the angular integral collapses to 2π.
        return Ok((2.0 * PI).ln() + gs.log_c_lambda + r.ln() - 0.25 * lambda * (r * r + dist * dist));
    }
    let alpha = gs.alpha;
    let beta = lambda * dist * r;
    // exponent in s = ln t, with e^{z} from I₀ folded in
    let g = |s: f64| {
        let t = s.exp();
        let z = beta * (t * (t + 1.0)).sqrt();
        -y * t + alpha * s - alpha * softplus(s) + z + i0e(z).ln()
    };
    let (smax, gmax) = maximise(&g, -50.0, 10.0, 701);
    let drop = 60.0;
    let mut lo = 0.5;
    while g(smax - lo) > gmax - drop {
        lo *= 2.0;
        if lo > 1e8 {
            return Err(Error::conv("kernel_bessel", "left tail does not decay"));
        }
    }
    let mut hi = 0.5;
    while g(smax + hi) > gmax - drop {
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::conv("kernel_bessel", "right tail does not decay"));
        }
    }
    let f = |s: f64| (g(s) - gmax).exp();
    let left = quad::adaptive(f, smax - lo, smax, KERNEL_TOL, 0.0, 4000)?;
    let right = quad::adaptive(f, smax, smax + hi, KERNEL_TOL, 0.0, 4000)?;
    Ok(prefix + gmax + (left.value + right.value).ln())
}

/// Grid scan followed by golden-section refinement.
fn maximise(g: &impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> (f64, f64) {
    let step = (b - a) / (n - 1) as f64;
    let (mut best, mut gbest) = (0, f64::NEG_INFINITY);
    for i in 0..n {
        let v = g(a + step * i as f64);
        if v > gbest {
            best = i;
            gbest = v;
        }
    }
    let (mut lo, mut hi) = (a + step * best.saturating_sub(1) as f64, a + step * (best + 1).min(n - 1) as f64);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut g1, mut g2) = (g(x1), g(x2));
    for _ in 0..80 {
        if g1 < g2 {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + phi * (hi - lo);
            g2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - phi * (hi - lo);
            g1 = g(x1);
        }
    }
    let s = 0.5 * (lo + hi);
    let gs = g(s);
    if gs >= gbest {
        (s, gs)
    } else {
        (a + step * best as f64, gbest)
    }
}

pub fn kernel_bessel(gs: &GroundState, dist: f64, r: f64) -> Result<f64> {
    kernel_bessel_log(gs, dist, r).map(f64::exp)
}

/// Angular trapezoid of the oscillatory definition, as e^{scale}·(re + i·im).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledComplex {
    pub log_scale: f64,
    pub value: Complex64,
}

impl ScaledComplex {
    pub fn to_complex(self) -> Complex64 {
        self.value * self.log_scale.exp()
    }
}

pub fn kernel_oscillatory_scaled(gs: &GroundState, dist: f64, r: f64) -> Result<ScaledComplex> {
    check_dist(gs, dist)?;
    check_r(gs, r)?;
    let lambda = gs.lambda();
    let xi = 0.5 * lambda * dist * r;
    let log_phi = |theta: f64| gs.log_phi_out((r * r + dist * dist - 2.0 * r * dist * theta.cos()).sqrt());
    // largest φ at θ = 0
    let scale = log_phi(0.0)?;
    let sum = |n: usize| -> Result<Complex64> {
        let mut s = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let theta = 2.0 * PI * k as f64 / n as f64;
            s += Complex64::from_polar((log_phi(theta)? - scale).exp(), xi * theta.sin());
        }
        Ok(s * (2.0 * PI / n as f64))
    };
    let mut n = 64usize.max(16 * (xi.ceil() as usize));
    let mut prev = sum(n)?;
    loop {
        n *= 2;
        let next = sum(n)?;
        if (next - prev).norm() <= 1e-13 * next.norm() {
            return Ok(ScaledComplex { log_scale: scale + r.ln(), value: next });
        }
        if n >= 1 << 16 {
            return Err(Error::conv("kernel_oscillatory", format!("{n} nodes, change {:.3e}", (next - prev).norm() / next.norm())));
        }
        prev = next;
    }
}

/// (Re, Im) of r∫₀^{2π} e^{iλδr sinθ/2} φ(|x − d|) dθ.
pub fn kernel_oscillatory(gs: &GroundState, dist: f64, r: f64) -> Result<(f64, f64)> {
    if r == 0.0 {
        check_dist(gs, dist)?;
        return Ok((0.0, 0.0));
    }
    let v = kernel_oscillatory_scaled(gs, dist, r)?.to_complex();
    Ok((v.re, v.im))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSample {
    pub r: f64,
    pub l_value: f64,
    pub l_oscillatory: f64,
}

/// Both kernel routes at n equally spaced radii in (0, a].
pub fn kernel_samples(gs: &GroundState, dist: f64, n: usize) -> Result<Vec<KernelSample>> {
    (1..=n)
        .map(|i| {
            let r = gs.radius() * i as f64 / n as f64;
            Ok(KernelSample { r, l_value: kernel_bessel(gs, dist, r)?, l_oscillatory: kernel_oscillatory(gs, dist, r)?.0 })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoppingResult {
    pub dist: f64,
    pub rho_bessel: f64,
    pub rho_angular: Option<f64>,
    pub rho_direct: Option<Complex64>,
    /// ln|ρ| per route; these survive when ρ itself underflows.
    pub log_abs_bessel: f64,
    pub log_abs_angular: Option<f64>,
    pub log_abs_direct: Option<f64>,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub log_lower: f64,
    pub log_upper: f64,
    pub gamma0_effective: f64,
    /// Routes that failed, with the reason.
    pub failed_routes: Vec<String>,
}

impl HoppingResult {
    /// Largest pairwise relative disagreement of |ρ| among the routes present.
    pub fn route_disagreement(&self) -> f64 {
        let mut logs = vec![self.log_abs_bessel];
        logs.extend(self.log_abs_angular);
        logs.extend(self.log_abs_direct);
        let mut worst: f64 = 0.0;
        for i in 0..logs.len() {
            for j in 0..logs.len() {
                if i != j {
                    worst = worst.max((logs[i] - logs[j]).exp_m1().abs());
                }
            }
        }
        worst
    }

    /// |Im ρ_direct| / |ρ_direct|.
    pub fn direct_imaginary_ratio(&self) -> Option<f64> {
        self.rho_direct.map(|z| z.im.abs() / z.norm())
    }
}

/// λ²∫₀^a φ v L dr with L supplied in log form, scaled by L(a).
fn radial_route(gs: &GroundState, log_kernel: impl Fn(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let a = gs.radius();
    let lambda = gs.lambda();
    let scale = log_kernel(a)?;
    let mut err = None;
    let q = quad::adaptive(
        |r| {
            if r == 0.0 {
                return 0.0;
            }
            match (gs.log_phi_in(r), log_kernel(r)) {
                (Ok(p), Ok(l)) => p.signum() * (p.log_magnitude + l - scale).exp(),
                (Err(e), _) | (_, Err(e)) => {
                    err.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        0.0,
        a,
        RHO_TOL,
        0.0,
        gs.config.tolerances.max_iterations.quadrature_intervals,
    );
    if let Some(e) = err {
        return Err(e);
    }
    let v = q?.value * gs.depth();
    // ρ = λ² v e^{scale}; return (ln|ρ|, ρ)
    let log_abs = 2.0 * lambda.ln() + v.abs().ln() + scale;
    Ok((log_abs, v.signum() * log_abs.exp()))
}

/// ρ = λ²∫_{B_a} φ(x) v₀(x) e^{−iλδx₂/2} φ(|x − d|) dx by Gauss–Legendre in r and
/// trapezoid in θ, both refined until stable. `phase = false` drops the magnetic
/// factor. Returns (ln|ρ|, ρ).
pub fn rho_direct(gs: &GroundState, dist: f64, phase: bool) -> Result<(f64, Complex64)> {
    check_dist(gs, dist)?;
    let a = gs.radius();
    let lambda = gs.lambda();
    let b = gs.config.b();
    let scale = gs.log_phi_out(dist - a)?;
    let eval = |nr: usize, nt: usize| -> Result<Complex64> {
        let rule = quad::GaussRule::new(nr);
        let mut total = Complex64::new(0.0, 0.0);
        for (r, w) in rule.nodes(0.0, a) {
            let p = gs.log_phi_in(r)?;
            let mut ring = Complex64::new(0.0, 0.0);
            for k in 0..nt {
                let theta = 2.0 * PI * k as f64 / nt as f64;
                let (x1, x2) = (r * theta.cos(), r * theta.sin());
                let dx = x1 - dist;
                let rd = (dx * dx + x2 * x2).sqrt();
                let amp = (p.log_magnitude + gs.log_phi_out(rd)? - scale).exp() * p.signum();
                // x·bA d with A d = ½(d₂, −d₁)
                let ph = if phase { -0.5 * b * dist * x2 } else { 0.0 };
                ring += Complex64::from_polar(amp, ph);
            }
            total += ring * (w * r * 2.0 * PI / nt as f64);
        }
        Ok(total)
    };
    let xi = 0.5 * b * dist * a;
    let mut nr = 16;
    let mut nt = 64usize.max(16 * xi.ceil() as usize);
    let mut prev = eval(nr, nt)?;
    loop {
        let next_r = eval(2 * nr, nt)?;
        let next_t = eval(nr, 2 * nt)?;
        let dr = (next_r - prev).norm();
        let dt = (next_t - prev).norm();
        let tol = 1e-12 * prev.norm();
        if dr <= tol && dt <= tol {
            let v = prev * (lambda * lambda * gs.depth());
            let log_abs = v.norm().ln() + scale;
            return Ok((log_abs, v * scale.exp()));
        }
        if nr >= 512 || nt >= 1 << 15 {
            return Err(Error::conv("rho_direct", format!("nr={nr}, nθ={nt}, changes {dr:.2e}/{dt:.2e}")));
        }
        if dr > tol {
            nr *= 2;
        }
        if dt > tol {
            nt *= 2;
        }
        prev = eval(nr, nt)?;
    }
}

/// ln|ρ(δ)| from the non-oscillatory route.
pub fn log_abs_rho(gs: &GroundState, dist: f64) -> Result<f64> {
    check_dist(gs, dist)?;
    if gs.depth() == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    radial_route(gs, |r| kernel_bessel_log(gs, dist, r)).map(|x| x.0)
}

pub fn hopping_all_routes(gs: &GroundState, dist: f64) -> Result<HoppingResult> {
    check_dist(gs, dist)?;
    let bounds = hopping_bounds(gs, dist)?;
    if gs.depth() == 0.0 {
        return Ok(HoppingResult {
            dist,
            rho_bessel: 0.0,
            rho_angular: Some(0.0),
            rho_direct: Some(Complex64::new(0.0, 0.0)),
            log_abs_bessel: f64::NEG_INFINITY,
            log_abs_angular: Some(f64::NEG_INFINITY),
            log_abs_direct: Some(f64::NEG_INFINITY),
            lower_bound: bounds.lower(),
            upper_bound: bounds.upper(),
            log_lower: bounds.log_lower,
            log_upper: bounds.log_upper,
            gamma0_effective: bounds.gamma0_effective,
            failed_routes: Vec::new(),
        });
    }
    let (log_abs_bessel, rho_bessel) = radial_route(gs, |r| kernel_bessel_log(gs, dist, r))?;
    let mut failed = Vec::new();
    let angular = radial_route(gs, |r| {
        let k = kernel_oscillatory_scaled(gs, dist, r)?;
        Ok(k.log_scale + k.value.re.ln())
    })
    .map_err(|e| failed.push(format!("angular: {e}")))
    .ok();
    let direct = rho_direct(gs, dist, true).map_err(|e| failed.push(format!("direct: {e}"))).ok();
    Ok(HoppingResult {
        dist,
        rho_bessel,
        rho_angular: angular.map(|x| x.1),
        rho_direct: direct.map(|x| x.1),
        log_abs_bessel,
        log_abs_angular: angular.map(|x| x.0),
        log_abs_direct: direct.map(|x| x.0),
        lower_bound: bounds.lower(),
        upper_bound: bounds.upper(),
        log_lower: bounds.log_lower,
        log_upper: bounds.log_upper,
        gamma0_effective: bounds.gamma0_effective,
        failed_routes: failed,
    })
}

/// Closed-form envelopes for |ρ(δ)| with unit prefactors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoppingBounds {
    /// ln[C_λ λ^{−1} e^{−λ(δ² + 4√(2ν)δ + a²)/4} ∫₀^a φ|v|r dr]
    pub log_lower: f64,
    /// ln[λ^{5/2} e^{−λ((δ−a)² − a²)/4}]
    pub log_upper: f64,
    pub gamma0_effective: f64,
}

impl HoppingBounds {
    pub fn lower(&self) -> f64 {
        self.log_lower.exp()
    }

    pub fn upper(&self) -> f64 {
        self.log_upper.exp()
    }
}

pub fn hopping_bounds(gs: &GroundState, dist: f64) -> Result<HoppingBounds> {
    check_dist(gs, dist)?;
    let (l, a, nu) = (gs.lambda(), gs.radius(), gs.nu);
    let rate = dist * dist + 4.0 * (2.0 * nu).sqrt() * dist;
    let overlap = overlap_well_integral(gs)?.value;
    let log_lower = gs.log_c_lambda - l.ln() - 0.25 * l * (rate + a * a) + overlap.ln();
    let log_upper = 2.5 * l.ln() - 0.25 * l * ((dist - a).powi(2) - a * a);
    Ok(HoppingBounds { log_lower, log_upper, gamma0_effective: -4.0 / l * log_lower - rate })
}

/// Minimiser of ¼(1+2t)r² + ν ln(1+1/t): ½(√(1+8ν/r²) − 1).
pub fn laplace_tstar(nu: f64, r: f64) -> f64 {
    let x = 8.0 * nu / (r * r);
    // same value without the cancellation at small x
    0.5 * x / ((1.0 + x).sqrt() + 1.0)
}

/// Laplace approximation of φ outside the disc. Requires λνt★ ≥ 4.
pub fn laplace_exterior_asymptote(gs: &GroundState, r: f64) -> Result<f64> {
    if !(r > gs.radius()) {
        return Err(Error::Domain(format!("asymptote needs r > a = {}, got {r}", gs.radius())));
    }
    let (l, nu) = (gs.lambda(), gs.nu);
    if !(nu > 0.0) {
        return Err(Error::OutOfRegime("ν = 0".into()));
    }
    let t = laplace_tstar(nu, r);
    if l * nu * t < 4.0 {
        return Err(Error::OutOfRegime(format!("λνt★ = {:.3} < 4 at r = {r}", l * nu * t)));
    }
    let log = gs.log_c_lambda + 0.5 * ((2.0 * PI / (l * nu)) * (1.0 + t * t / (1.0 + 2.0 * t))).ln() - l * laplace_q(nu, r);
    Ok(log.exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub x: f64,
    pub dist: f64,
    /// ln|ρ(xδ)/ρ(δ)|
    pub log_ratio: f64,
    /// ln K★ − λ(x² − 1)δ²/8
    pub log_bound: f64,
    pub k_star: f64,
    /// max over r of L̃_{xδ}(r)/L̃_δ(r), L̃_δ = L_δ e^{λ(r²+δ²)/8}
    pub kernel_ratio_max: f64,
    pub c_star: f64,
    pub passed: bool,
}

pub fn hopping_ratio_check(gs: &GroundState, dist: f64, x: f64) -> Result<RatioReport> {
    check_dist(gs, dist)?;
    if !(x >= 1.0) {
        return Err(Error::Domain(format!("ratio check needs x ≥ 1, got {x}")));
    }
    let l = gs.lambda();
    let far = x * dist;
    let log_ratio = if x == 1.0 { 0.0 } else { log_abs_rho(gs, far)? - log_abs_rho(gs, dist)? };
    let k_star = frozen::RATIO_K_STAR;
    let log_bound = k_star.ln() - l * (x * x - 1.0) * dist * dist / 8.0;
    let mut kernel_ratio_max: f64 = 0.0;
    let n = 16;
    for i in 1..=n {
        let r = gs.radius() * i as f64 / n as f64;
        let tl = |d: f64| kernel_bessel_log(gs, d, r).map(|v| v + l * (r * r + d * d) / 8.0);
        kernel_ratio_max = kernel_ratio_max.max((tl(far)? - tl(dist)?).exp());
    }
    let c_star = frozen::KERNEL_C_STAR;
    Ok(RatioReport {
        x,
        dist,
        log_ratio,
        log_bound,
        k_star,
        kernel_ratio_max,
        c_star,
        passed: log_ratio <= log_bound && kernel_ratio_max <= c_star,
    })
}

/// φ outside the disc against the decay envelopes, with the frozen window.
pub fn decay_window_ok(gs: &GroundState, r: f64) -> Result<bool> {
    let b = decay_bounds(gs);
    let lp = gs.log_phi_out(r)?;
    Ok(frozen::within_window(lp, b.log_lower(r), b.log_upper(r), frozen::DECAY_LOWER_K, frozen::DECAY_UPPER_K))
}
