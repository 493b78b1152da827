//! Schur-complement reduction of the double well onto V = span{φ₀, φ_d}.
//!
//! With ℋ = H − e₀, Π the projector onto V and Π⊥ = 1 − Π, z is an
//! eigenvalue of ℋ near 0 iff det[(−z, ρ; ρ̄, −z) + B(z)] = 0 where
//! B(z) = ΠℋΠ − A + D(z) and D(z) = −ΠℋΠ⊥(Π⊥(ℋ − z)Π⊥)⁻¹Π⊥ℋΠ.

use std::sync::Mutex;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::model::ModelConfig;
use crate::planar::{build_hamiltonian, lowest_eigenpairs, magnetic_translate, DiscreteOperator, Wells};
use crate::radial::solve_ground_state;

pub type Mat2 = Matrix2<C64>;

/// Orthonormal basis {φ₀, φ̃_d} of V on the grid.
#[derive(Debug, Clone)]
pub struct OrbitalPair {
    pub phi0: Vec<C64>,
    pub phi_d: Vec<C64>,
    pub phi_tilde_d: Vec<C64>,
    /// ⟨φ₀, φ_d⟩
    pub overlap: C64,
    /// ⟨φ₀, hφ₀⟩ for the single-well operator h
    pub e0: f64,
    /// second single-well eigenvalue
    pub e1: f64,
    pub single: DiscreteOperator,
}

/// φ₀ is the lowest eigenvector of the discrete single well (phase fixed so
/// its value at the well centre is positive), φ_d its magnetic translate.
pub fn orbital_basis(cfg: &ModelConfig) -> Result<OrbitalPair> {
    let single = build_hamiltonian(cfg, Wells::Single)?;
    let shift = solve_ground_state(cfg)?.e0 - 0.1 * cfg.lambda;
    let eig = lowest_eigenpairs(&single, 2, shift)?;
    let g = single.grid;
    let mut phi0 = eig.eigenvectors[0].clone();
    let c = phi0[g.index(g.origin_i, g.origin_j)];
    linalg::scale(c.conj() / c.norm() / linalg::norm(&phi0), &mut phi0);
    let e0 = single.expectation(&phi0);
    let phi_d = magnetic_translate(&phi0, &g, single.b, g.steps as i64)?;
    let overlap = linalg::dot(&phi0, &phi_d);
    if overlap.norm() >= 0.5 {
        return Err(Error::ReductionInvalid(format!("|⟨φ₀, φ_d⟩| = {:.3} ≥ 0.5: wells too close", overlap.norm())));
    }
    let mut phi_tilde_d = phi_d.clone();
    linalg::axpy(-overlap, &phi0, &mut phi_tilde_d);
    let n = linalg::norm(&phi_tilde_d);
    linalg::scale(C64::new(1.0 / n, 0.0), &mut phi_tilde_d);
    Ok(OrbitalPair { phi0, phi_d, phi_tilde_d, overlap, e0, e1: eig.eigenvalues[1], single })
}

/// Solves Π⊥(H − shift)Π⊥ u = r for r ∈ V⊥ with every iterate kept in V⊥.
fn deflated_solve(op: &DiscreteOperator, basis: &[&[C64]], shift: f64, r: &[C64], u: &mut [C64], tol: f64) -> Result<(usize, f64)> {
    let project = |x: &mut [C64]| linalg::project_out(basis, x);
    let apply = |x: &[C64], y: &mut [C64]| {
        op.apply(x, y);
        linalg::axpy(C64::new(-shift, 0.0), x, y);
        linalg::project_out(basis, y);
    };
    project(u);
    let stats = linalg::cg(&apply, r, u, tol, op.tolerances.max_iterations.linear, Some(&project))
        .map_err(|e| Error::conv("deflated solve", format!("{e}; basis size {}", basis.len())))?;
    let nu = linalg::norm(u).max(f64::MIN_POSITIVE);
    let leak = basis.iter().map(|q| linalg::dot(q, u).norm() / nu).fold(0.0, f64::max);
    Ok((stats.iterations, leak))
}

pub struct EffectiveMatrices {
    pub op: DiscreteOperator,
    pub pair: OrbitalPair,
    /// energy subtracted from H (e₀, or 0 when not centred)
    pub center: f64,
    /// ΠℋΠ in the basis {φ₀, φ̃_d}
    pub pi_h_pi: Mat2,
    /// ρ = ⟨φ₀, ℋφ_d⟩
    pub rho: C64,
    /// ⟨φ₀, λ²v₀φ_d⟩ with v₀ the well at the origin
    pub rho_potential: C64,
    /// ⟨φ₀, λ²v_dφ₀⟩
    pub self_energy_potential: f64,
    /// ⟨φ_d, λ²v₀φ_d⟩
    pub mirror_energy_potential: f64,
    /// ‖Π⊥ℋΠ‖
    pub coupling_norm: f64,
    r: [Vec<C64>; 2],
    warm: Mutex<Option<[Vec<C64>; 2]>>,
    /// max |⟨q, u⟩|/‖u‖ over basis vectors q and all D(z) solutions so far
    pub deflation_leak: Mutex<f64>,
}

impl EffectiveMatrices {
    pub fn a_matrix(&self) -> Mat2 {
        Mat2::new(C64::new(0.0, 0.0), self.rho, self.rho.conj(), C64::new(0.0, 0.0))
    }

    fn basis(&self) -> [&[C64]; 2] {
        [&self.pair.phi0, &self.pair.phi_tilde_d]
    }

    /// D(z) for real z.
    pub fn d_of_z(&self, z: f64) -> Result<Mat2> {
        let shift = self.center + z;
        let tol = 1e-13 * self.coupling_norm.max(f64::MIN_POSITIVE);
        let mut warm = self.warm.lock().expect("warm-start lock");
        let mut u = warm.clone().unwrap_or_else(|| [self.r[0].clone(), self.r[1].clone()]);
        let mut leak: f64 = 0.0;
        for (r, uj) in self.r.iter().zip(u.iter_mut()) {
            let (_, l) = deflated_solve(&self.op, &self.basis(), shift, r, uj, tol)?;
            leak = leak.max(l);
        }
        {
            let mut worst = self.deflation_leak.lock().expect("leak lock");
            *worst = worst.max(leak);
        }
        let d = Mat2::from_fn(|i, j| -linalg::dot(&self.r[i], &u[j]));
        *warm = Some(u);
        Ok(d)
    }

    pub fn b_of_z(&self, z: f64) -> Result<Mat2> {
        Ok(self.pi_h_pi - self.a_matrix() + self.d_of_z(z)?)
    }

    /// det[(−z, ρ; ρ̄, −z) + B(z)]
    pub fn determinant(&self, z: f64) -> Result<C64> {
        let m = Mat2::new(C64::new(-z, 0.0), self.rho, self.rho.conj(), C64::new(-z, 0.0)) + self.b_of_z(z)?;
        Ok(m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)])
    }

    /// f(w) = tr B(|ρ|w)/|ρ| and g(w) = (ρB₂₁ + ρ̄B₁₂ − det B)/|ρ|², so that
    /// the determinant condition reads w² − 1 − f w − g = 0.
    pub fn f_g(&self, w: f64) -> Result<(f64, f64)> {
        let rho_abs = self.rho.norm();
        let b = self.b_of_z(w * rho_abs)?;
        let tr = b[(0, 0)] + b[(1, 1)];
        let det = b[(0, 0)] * b[(1, 1)] - b[(0, 1)] * b[(1, 0)];
        let g = (self.rho * b[(1, 0)] + self.rho.conj() * b[(0, 1)] - det) / (rho_abs * rho_abs);
        Ok((tr.re / rho_abs, g.re))
    }
}

pub fn effective_matrices(cfg: &ModelConfig, centered: bool) -> Result<EffectiveMatrices> {
    let pair = orbital_basis(cfg)?;
    let op = build_hamiltonian(cfg, Wells::Double)?;
    let center = if centered { pair.e0 } else { 0.0 };
    let n = op.dimension();
    let h_apply = |x: &[C64]| {
        let mut y = vec![C64::new(0.0, 0.0); n];
        op.apply(x, &mut y);
        linalg::axpy(C64::new(-center, 0.0), x, &mut y);
        y
    };
    let h0 = h_apply(&pair.phi0);
    let ht = h_apply(&pair.phi_tilde_d);
    let rho = linalg::dot(&pair.phi0, &h_apply(&pair.phi_d));
    // λ²v₀ is the single-well potential; λ²v_d is the rest of the double-well potential
    let v0: Vec<f64> = pair.single.potential.clone();
    let rho_potential = pair.phi0.iter().zip(&pair.phi_d).zip(&v0).map(|((a, b), v)| a.conj() * b * *v).sum();
    let self_energy_potential: f64 = pair.phi0.iter().zip(op.potential.iter().zip(&v0)).map(|(a, (vt, v))| a.norm_sqr() * (vt - v)).sum();
    let mirror_energy_potential: f64 = pair.phi_d.iter().zip(&v0).map(|(a, v)| a.norm_sqr() * v).sum();
    // Diagonal entries from ⟨φ₀,(h₀ − e₀)φ₀⟩ = 0 (e₀ is that Rayleigh quotient)
    // and (h_d − e₀)φ_d = R(h₀ − e₀)φ₀. Forming ⟨φ₀, (H − e₀)φ₀⟩ directly
    // leaves rounding of order 1e−16·|e₀|, which swamps |ρ| at λ ≳ 12.
    let shift = C64::new(pair.e0 - center, 0.0);
    let a = shift + self_energy_potential;
    let b = shift + mirror_energy_potential;
    let (s, n) = (pair.overlap, (1.0 - pair.overlap.norm_sqr()).sqrt());
    let off = (rho - s * a) / n;
    let diag = (b - s.conj() * rho - s * rho.conj() + s.norm_sqr() * a) / (n * n);
    let pi_h_pi = Mat2::new(a, off, off.conj(), C64::new(diag.re, 0.0));
    let basis = [pair.phi0.as_slice(), pair.phi_tilde_d.as_slice()];
    let mut r0 = h0;
    let mut r1 = ht;
    linalg::project_out(&basis, &mut r0);
    linalg::project_out(&basis, &mut r1);
    // ‖Π⊥ℋΠ‖² is the top eigenvalue of the 2×2 Gram matrix of r₀, r₁
    let gram = Mat2::new(linalg::dot(&r0, &r0), linalg::dot(&r0, &r1), linalg::dot(&r1, &r0), linalg::dot(&r1, &r1));
    let (tr, det) = ((gram[(0, 0)] + gram[(1, 1)]).re, (gram[(0, 0)] * gram[(1, 1)] - gram[(0, 1)] * gram[(1, 0)]).re);
    let coupling_norm = (0.5 * (tr + (tr * tr - 4.0 * det).max(0.0).sqrt())).sqrt();
    if rho.norm() == 0.0 {
        return Err(Error::ReductionInvalid("ρ vanishes on the grid".into()));
    }
    Ok(EffectiveMatrices {
        op,
        pair,
        center,
        pi_h_pi,
        rho,
        rho_potential,
        self_energy_potential,
        mirror_energy_potential,
        coupling_norm,
        r: [r0, r1],
        warm: Mutex::new(None),
        deflation_leak: Mutex::new(0.0),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReductionReport {
    pub lambda: f64,
    pub e0_single: f64,
    pub rho_abs: f64,
    pub overlap_abs: f64,
    /// E₀, E₁ = e₀ + z₋, e₀ + z₊
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
    pub w_roots: [f64; 2],
    /// |Im det| / max(|det| scale) at the roots
    pub imag_residue: f64,
    pub max_abs_f: f64,
    pub max_abs_g: f64,
    pub deflation_leak: f64,
    pub coupling_norm: f64,
    /// ‖D(0)‖
    pub d0_norm: f64,
}

/// Root of F on [lo, hi] by Illinois false position.
fn bracketed_root(f: &dyn Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, max_it: usize) -> Result<f64> {
    let (mut flo, mut fhi) = (f(lo)?, f(hi)?);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::ReductionInvalid(format!("no sign change of the determinant on w ∈ [{lo}, {hi}]")));
    }
    let mut side = 0;
    for _ in 0..max_it {
        let x = (lo * fhi - hi * flo) / (fhi - flo);
        let fx = f(x)?;
        if fx == 0.0 || (hi - lo).abs() <= 1e-13 * x.abs().max(1.0) {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
        if (hi - lo).abs() <= 1e-13 * x.abs().max(1.0) {
            return Ok(x);
        }
    }
    Err(Error::conv("reduction root", format!("bracket [{lo}, {hi}]")))
}

/// Roots of the determinant condition in w = z/|ρ| on [±1 − ε, ±1 + ε], ε = 0.5.
pub fn splitting_from_reduction(cfg: &ModelConfig) -> Result<ReductionReport> {
    let em = effective_matrices(cfg, true)?;
    reduce_with(cfg, &em)
}

pub fn reduce_with(cfg: &ModelConfig, em: &EffectiveMatrices) -> Result<ReductionReport> {
    let rho_abs = em.rho.norm();
    let scaled = |w: f64| -> Result<f64> { Ok(em.determinant(w * rho_abs)?.re / (rho_abs * rho_abs)) };
    let eps = 0.5;
    let caps = cfg.tolerances.max_iterations.bisection;
    let wm = bracketed_root(&scaled, -1.0 - eps, -1.0 + eps, caps)?;
    let wp = bracketed_root(&scaled, 1.0 - eps, 1.0 + eps, caps)?;
    let mut imag: f64 = 0.0;
    for w in [wm, wp] {
        let d = em.determinant(w * rho_abs)?;
        imag = imag.max(d.im.abs() / (rho_abs * rho_abs));
    }
    let (mut mf, mut mg): (f64, f64) = (0.0, 0.0);
    // K = 2: sample |w| ≤ 2
    for k in 0..=40 {
        let w = -2.0 + 0.1 * k as f64;
        let (f, g) = em.f_g(w)?;
        mf = mf.max(f.abs());
        mg = mg.max(g.abs());
    }
    let d0 = em.d_of_z(0.0)?;
    let d0_norm = spectral_norm(&d0);
    let leak = *em.deflation_leak.lock().expect("leak lock");
    Ok(ReductionReport {
        lambda: cfg.lambda,
        e0_single: em.pair.e0,
        rho_abs,
        overlap_abs: em.pair.overlap.norm(),
        e0: em.center + wm * rho_abs,
        e1: em.center + wp * rho_abs,
        gap: (wp - wm) * rho_abs,
        w_roots: [wm, wp],
        imag_residue: imag,
        max_abs_f: mf,
        max_abs_g: mg,
        deflation_leak: leak,
        coupling_norm: em.coupling_norm,
        d0_norm,
    })
}

/// Largest singular value of a 2×2 matrix.
pub fn spectral_norm(m: &Mat2) -> f64 {
    let g = m.adjoint() * m;
    let (tr, det) = ((g[(0, 0)] + g[(1, 1)]).re, (g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)]).re);
    (0.5 * (tr + (tr * tr - 4.0 * det).max(0.0).sqrt())).sqrt()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeReport {
    pub lambda: f64,
    pub z: f64,
    pub wells: Wells,
    /// 1/σ_min of Π⊥(ℋ − z)Π⊥ on V⊥
    pub probe: f64,
    pub sigma_min: f64,
    /// e₁ − e₀ of the single well, for comparison
    pub single_gap: f64,
    /// smallest Rayleigh quotient of ℋ − z among the sampled iterates
    pub quadratic_form_min: f64,
    pub iterations: usize,
}

/// ‖(Π⊥(ℋ − z)Π⊥)⁻¹‖ by inverse iteration inside V⊥. With `Wells::Single`
/// the operator is the single well and V = span{φ₀}.
pub fn resolvent_probe(cfg: &ModelConfig, z: f64, wells: Wells) -> Result<ProbeReport> {
    let pair = orbital_basis(cfg)?;
    let (op, basis): (DiscreteOperator, Vec<&[C64]>) = match wells {
        Wells::Double => (build_hamiltonian(cfg, Wells::Double)?, vec![&pair.phi0, &pair.phi_tilde_d]),
        Wells::Single => (pair.single.clone(), vec![&pair.phi0]),
        Wells::None => return Err(Error::InvalidConfig("resolvent probe needs at least one well".into())),
    };
    let shift = pair.e0 + z;
    let n = op.dimension();
    let mut x: Vec<C64> = (0..n)
        .map(|k| {
            let (i, j) = (k / op.grid.ny, k % op.grid.ny);
            let (x1, x2) = op.grid.coords(i, j);
            // smooth start localized on the wells
            let r2 = x1 * x1 + x2 * x2;
            C64::new((-0.25 * cfg.lambda * r2).exp() * (1.0 + x1), x2)
        })
        .collect();
    linalg::project_out(&basis, &mut x);
    linalg::scale(C64::new(1.0 / linalg::norm(&x), 0.0), &mut x);
    let rayleigh = |v: &[C64]| op.expectation(v) - shift * linalg::dot(v, v).re;
    let mut sigma = rayleigh(&x);
    let mut qmin = sigma;
    let tol = 1e-10 * op.norm_estimate();
    for it in 1..=cfg.tolerances.max_iterations.eigen_outer {
        let mut y = x.clone();
        linalg::scale(C64::new(1.0 / sigma.max(1e-300), 0.0), &mut y);
        deflated_solve(&op, &basis, shift, &x, &mut y, tol)?;
        let ny = linalg::norm(&y);
        linalg::scale(C64::new(1.0 / ny, 0.0), &mut y);
        x = y;
        let next = rayleigh(&x);
        qmin = qmin.min(next);
        if (next - sigma).abs() <= 1e-9 * next.abs() {
            return Ok(ProbeReport {
                lambda: cfg.lambda,
                z,
                wells,
                probe: 1.0 / next,
                sigma_min: next,
                single_gap: pair.e1 - pair.e0,
                quadratic_form_min: qmin,
                iterations: it,
            });
        }
        sigma = next;
    }
    Err(Error::conv("resolvent probe", format!("σ estimate {sigma}")))
}
