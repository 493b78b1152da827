//! Dense-vector kernels with thread-count independent reductions, and CG.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const CHUNK: usize = 8192;

/// ⟨a, b⟩ = Σ conj(aᵢ)bᵢ, summed per fixed chunk then in order.
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    let parts: Vec<C64> =
        a.par_chunks(CHUNK).zip(b.par_chunks(CHUNK)).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p.conj() * q).sum()).collect();
    parts.into_iter().sum()
}

pub fn norm(a: &[C64]) -> f64 {
    let parts: Vec<f64> = a.par_chunks(CHUNK).map(|x| x.iter().map(|p| p.norm_sqr()).sum()).collect();
    parts.into_iter().sum::<f64>().sqrt()
}

/// y ← y + s·x
pub fn axpy(s: C64, x: &[C64], y: &mut [C64]) {
    y.par_chunks_mut(CHUNK).zip(x.par_chunks(CHUNK)).for_each(|(yc, xc)| {
        for (v, u) in yc.iter_mut().zip(xc) {
            *v += s * u;
        }
    });
}

pub fn scale(s: C64, x: &mut [C64]) {
    x.par_chunks_mut(CHUNK).for_each(|c| c.iter_mut().for_each(|v| *v *= s));
}

/// Removes the components along orthonormal `basis` (two passes).
pub fn project_out(basis: &[&[C64]], x: &mut [C64]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, x);
            axpy(-c, q, x);
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CgStats {
    pub iterations: usize,
    pub residual: f64,
}

/// Maps a vector back into the admissible subspace in place.
pub type Projector<'a> = &'a dyn Fn(&mut [C64]);

/// Conjugate gradients for a Hermitian positive definite `apply`, starting
/// from `x`. Stops when the true residual is ≤ `tol` (absolute). `project`,
/// if given, is applied to every residual and search direction so iterates
/// stay in a subspace where the operator is definite.
pub fn cg(
    apply: &dyn Fn(&[C64], &mut [C64]),
    b: &[C64],
    x: &mut [C64],
    tol: f64,
    max_iter: usize,
    project: Option<Projector>,
) -> Result<CgStats> {
    let n = b.len();
    let mut r = vec![C64::new(0.0, 0.0); n];
    let mut ap = vec![C64::new(0.0, 0.0); n];
    let true_residual = |x: &[C64], r: &mut [C64], ap: &mut [C64]| {
        apply(x, ap);
        r.par_iter_mut().zip(b.par_iter().zip(ap.par_iter())).for_each(|(ri, (bi, ai))| *ri = bi - ai);
        if let Some(p) = project {
            p(r);
        }
    };
    true_residual(x, &mut r, &mut ap);
    let mut p = r.clone();
    let mut rr = dot(&r, &r).re;
    let mut it = 0;
    loop {
        if rr.sqrt() <= tol {
            // confirm against the true residual before stopping
            true_residual(x, &mut r, &mut ap);
            rr = dot(&r, &r).re;
            if rr.sqrt() <= tol {
                return Ok(CgStats { iterations: it, residual: rr.sqrt() });
            }
            p.copy_from_slice(&r);
        }
        if it >= max_iter {
            return Err(Error::conv("conjugate gradients", format!("residual {:.3e} > {tol:.3e} after {it} iterations", rr.sqrt())));
        }
        apply(&p, &mut ap);
        if let Some(pr) = project {
            pr(&mut ap);
        }
        let pap = dot(&p, &ap).re;
        if !(pap > 0.0) {
            return Err(Error::conv("conjugate gradients", format!("operator not positive definite (pᴴAp = {pap:.3e})")));
        }
        let alpha = rr / pap;
        axpy(C64::new(alpha, 0.0), &p, x);
        it += 1;
        if it % 50 == 0 {
            true_residual(x, &mut r, &mut ap);
        } else {
            axpy(C64::new(-alpha, 0.0), &ap, &mut r);
        }
        let rr_new = dot(&r, &r).re;
        let beta = rr_new / rr;
        rr = rr_new;
        p.par_iter_mut().zip(r.par_iter()).for_each(|(pi, ri)| *pi = ri + beta * *pi);
    }
}
