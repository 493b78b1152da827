//! Scaled special functions evaluated in log space.

pub mod quad;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
    Zero,
}

/// sign·exp(log_magnitude). Zero is `Sign::Zero` with log_magnitude = −∞.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogValue {
    pub log_magnitude: f64,
    pub sign: Sign,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue { log_magnitude: f64::NEG_INFINITY, sign: Sign::Zero };

    pub fn positive(log_magnitude: f64) -> Self {
        LogValue { log_magnitude, sign: Sign::Plus }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogValue { log_magnitude: x.abs().ln(), sign: if x > 0.0 { Sign::Plus } else { Sign::Minus } }
        }
    }

    pub fn signum(&self) -> f64 {
        match self.sign {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
            Sign::Zero => 0.0,
        }
    }

    /// May overflow to ±∞ or underflow to 0.
    pub fn value(&self) -> f64 {
        match self.sign {
            Sign::Zero => 0.0,
            _ => self.signum() * self.log_magnitude.exp(),
        }
    }

    pub fn mul(&self, other: &LogValue) -> LogValue {
        match (self.sign, other.sign) {
            (Sign::Zero, _) | (_, Sign::Zero) => Self::ZERO,
            (a, b) => {
                LogValue { log_magnitude: self.log_magnitude + other.log_magnitude, sign: if a == b { Sign::Plus } else { Sign::Minus } }
            }
        }
    }
}

/// ln(1 + eˢ) without overflow.
pub fn softplus(s: f64) -> f64 {
    if s > 0.0 {
        s + (-s).exp().ln_1p()
    } else {
        s.exp().ln_1p()
    }
}

// Chebyshev coefficients for e^{-x} I0(x), x in [0, 8] and (8, inf) (Cephes).
const I0E_A: [f64; 30] = [
    -4.415_341_646_479_339_5E-18,
    3.330_794_518_822_238_4E-17,
    -2.431_279_846_547_955E-16,
    1.715_391_285_555_133E-15,
    -1.168_533_287_799_345_1E-14,
    7.676_185_498_604_936E-14,
    -4.856_446_783_111_929E-13,
    2.955_052_663_129_64E-12,
    -1.726_826_291_441_556E-11,
    9.675_809_035_373_237E-11,
    -5.189_795_601_635_263E-10,
    2.659_823_724_682_386_6E-9,
    -1.300_025_009_986_248E-8,
    6.046_995_022_541_919E-8,
    -2.670_793_853_940_612E-7,
    1.117_387_539_120_103_7E-6,
    -4.416_738_358_458_750_5E-6,
    1.644_844_807_072_889_6E-5,
    -5.754_195_010_082_104E-5,
    1.885_028_850_958_416_5E-4,
    -5.763_755_745_385_824E-4,
    1.639_475_616_941_335_7E-3,
    -4.324_309_995_050_576E-3,
    1.054_646_039_459_499_8E-2,
    -2.373_741_480_589_947E-2,
    4.930_528_423_967_071E-2,
    -9.490_109_704_804_764E-2,
    1.716_209_015_222_087_7E-1,
    -3.046_826_723_431_984E-1,
    6.767_952_744_094_761E-1,
];
const I0E_B: [f64; 25] = [
    -7.233_180_487_874_754E-18,
    -4.830_504_485_944_182E-18,
    4.465_621_420_296_76E-17,
    3.461_222_867_697_461E-17,
    -2.827_623_980_516_583_6E-16,
    -3.425_485_619_677_219E-16,
    1.772_560_133_056_526_3E-15,
    3.811_680_669_352_622_4E-15,
    -9.554_846_698_828_307E-15,
    -4.150_569_347_287_222E-14,
    1.540_086_217_521_41E-14,
    3.852_778_382_742_142_6E-13,
    7.180_124_451_383_666E-13,
    -1.794_178_531_506_806_2E-12,
    -1.321_581_184_044_771_3E-11,
    -3.149_916_527_963_241_6E-11,
    1.188_914_710_784_643_9E-11,
    4.940_602_388_224_97E-10,
    3.396_232_025_708_386_5E-9,
    2.266_668_990_498_178E-8,
    2.048_918_589_469_063_8E-7,
    2.891_370_520_834_756_7E-6,
    6.889_758_346_916_825E-5,
    3.369_116_478_255_694_3E-3,
    8.044_904_110_141_088E-1,
];

fn chbevl(x: f64, coeffs: &[f64]) -> f64 {
    let mut b0 = coeffs[0];
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for c in &coeffs[1..] {
        b2 = b1;
        b1 = b0;
        b0 = x.mul_add(b1, *c) - b2;
    }
    0.5 * (b0 - b2)
}

/// e^{-z} I₀(z) for z ≥ 0, no argument check.
pub(crate) fn i0e(z: f64) -> f64 {
    if z <= 8.0 {
        chbevl(0.5 * z - 2.0, &I0E_A)
    } else {
        chbevl(32.0 / z - 2.0, &I0E_B) / z.sqrt()
    }
}

/// e^{-z} I₀(z).
pub fn bessel_i0_scaled(z: f64) -> Result<f64> {
    if !(z >= 0.0) || z.is_infinite() {
        return Err(Error::Domain(format!("bessel_i0_scaled needs finite z ≥ 0, got {z}")));
    }
    Ok(i0e(z))
}

/// ∫₀^{2π} exp(iξ sinθ + β cosθ) dθ, by periodic trapezoid sums on the
/// contour θ + iκ with tanh κ = ξ/β, where the integrand stops oscillating.
/// Requires β ≥ |ξ|.
pub fn ring_phase_integral(xi: f64, beta: f64) -> Result<f64> {
    Ok(ring_phase_integral_complex(xi, beta)?.re)
}

/// Same as [`ring_phase_integral`] but keeps the (rounding-level) imaginary part.
pub fn ring_phase_integral_complex(xi: f64, beta: f64) -> Result<Complex64> {
    if !(xi.is_finite() && beta.is_finite()) || beta < xi.abs() {
        return Err(Error::Domain(format!("ring_phase_integral needs β ≥ |ξ|, got ξ={xi}, β={beta}")));
    }
    if beta == 0.0 {
        return Ok(Complex64::new(2.0 * PI, 0.0));
    }
    let kappa = if beta > xi.abs() {
        0.5 * ((beta + xi) / (beta - xi)).ln()
    } else {
        // β = |ξ|: any large shift flattens the integrand to 1 + O(βe^{-κ})
        xi.signum() * (beta.ln().max(0.0) + 40.0)
    };
    let f = |theta: f64| {
        let t = Complex64::new(theta, kappa);
        (Complex64::i() * xi * t.sin() + beta * t.cos()).exp()
    };
    let mut n = 32usize;
    let mut prev = trapezoid_periodic(&f, n);
    loop {
        n *= 2;
        let cur = trapezoid_periodic(&f, n);
        if (cur - prev).norm() <= 1e-15 * cur.norm() || n >= 1 << 16 {
            return if (cur - prev).norm() <= 1e-12 * cur.norm() {
                Ok(cur)
            } else {
                Err(Error::conv("ring_phase_integral", format!("trapezoid stalled at {n} nodes")))
            };
        }
        prev = cur;
    }
}

fn trapezoid_periodic(f: &impl Fn(f64) -> Complex64, n: usize) -> Complex64 {
    let h = 2.0 * PI / n as f64;
    let mut s = Complex64::new(0.0, 0.0);
    for k in 0..n {
        s += f(h * k as f64);
    }
    s * h
}

/// ln M(a, b; y) by the ascending series, with the ratio Σ|terms| / |Σ| as a
/// conditioning diagnostic.
pub(crate) fn kummer_series(a: f64, b: f64, y: f64) -> Result<(LogValue, f64)> {
    if !(y >= 0.0 && y.is_finite()) || !(b > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("kummer series needs y ≥ 0, b > 0 (a={a}, b={b}, y={y})")));
    }
    const BIG: f64 = 1e250;
    let mut scale = 0.0_f64; // log of the factor divided out so far
    let mut sum = 1.0_f64;
    let mut abs_sum = 1.0_f64;
    let mut term = 1.0_f64;
    let kmax = 200 + (4.0 * y + a.abs() * 2.0) as usize;
    for k in 0..kmax {
        let kf = k as f64;
        term *= (a + kf) / ((b + kf) * (kf + 1.0)) * y;
        sum += term;
        abs_sum += term.abs();
        if abs_sum > BIG {
            sum /= BIG;
            abs_sum /= BIG;
            term /= BIG;
            scale += BIG.ln();
        }
        let past_sign_changes = kf + 1.0 > -a;
        if term == 0.0 || (past_sign_changes && term.abs() <= 1e-17 * sum.abs() && kf > y) {
            let lv = LogValue::from_f64(sum);
            let lv = LogValue { log_magnitude: lv.log_magnitude + scale, sign: lv.sign };
            return Ok((lv, abs_sum / sum.abs()));
        }
    }
    Err(Error::conv("kummer series", format!("a={a}, b={b}, y={y}")))
}

/// ln M(α, 1; y), the Kummer function regular at the origin.
pub fn kummer_m_log(alpha: f64, y: f64) -> Result<LogValue> {
    kummer_series(alpha, 1.0, y).map(|(v, _)| v)
}

/// ln ∫₀^∞ e^{−yt} t^{α+p−1} (1+t)^{−α} dt for α + p > 0, y > 0.
///
/// p = 0 gives W(α, y) = Γ(α)U(α, 1, y); p = 1 gives −∂W/∂y. The integral is
/// taken in s = ln t, where the exponent is strictly concave with a closed-form
/// maximiser, so one mapping handles both the endpoint-dominated and the
/// interior-dominated regimes.
pub fn tricomi_w_log(alpha: f64, y: f64, p: f64, rel_tol: f64) -> Result<f64> {
    let q = alpha + p;
    if !(alpha >= 0.0 && q > 0.0 && y > 0.0 && y.is_finite() && alpha.is_finite()) {
        return Err(Error::Domain(format!("tricomi integral needs α ≥ 0, α+p > 0, y > 0 (α={alpha}, p={p}, y={y})")));
    }
    let g = |s: f64| -y * s.exp() + q * s - alpha * softplus(s);
    // y t² + (y − p) t − q = 0
    let c = y - p;
    let disc = (c * c + 4.0 * y * q).sqrt();
    let tstar = if c >= 0.0 { 2.0 * q / (c + disc) } else { (disc - c) / (2.0 * y) };
    let sstar = tstar.ln();
    let gstar = g(sstar);
    let curv = y * tstar + alpha * tstar / ((1.0 + tstar) * (1.0 + tstar));
    let width = 1.0 / curv.sqrt();
    let drop = 60.0;
    let mut lo = width;
    while g(sstar - lo) > gstar - drop {
        lo *= 2.0;
        if lo > 1e9 {
            return Err(Error::conv("tricomi integral", "left tail does not decay"));
        }
    }
    let mut hi = width;
    while g(sstar + hi) > gstar - drop {
        hi *= 2.0;
    }
    let f = |s: f64| (g(s) - gstar).exp();
    let left = quad::adaptive(f, sstar - lo, sstar, rel_tol, 0.0, 4000)?;
    let right = quad::adaptive(f, sstar, sstar + hi, rel_tol, 0.0, 4000)?;
    Ok(gstar + (left.value + right.value).ln())
}

/// ln W(α, y) with W(α, y) = ∫₀^∞ e^{−yt} t^{α−1}(1+t)^{−α} dt = Γ(α)U(α, 1, y).
pub fn tricomi_u_log(alpha: f64, y: f64) -> Result<LogValue> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("tricomi_u_log needs α > 0, got {alpha}")));
    }
    tricomi_w_log(alpha, y, 0.0, 1e-12).map(LogValue::positive)
}
