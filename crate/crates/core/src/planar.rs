//! Finite-difference H = (P − bAx)² + λ²V on a rectangle with Peierls links.
//!
//! Sites are x = (i·h + x0, j·h + y0), stored at index i·ny + j. The hopping
//! entry along an edge e is H[x, x+e] = −exp(−ib∫A·dl)/h² with A x = ½(x₂, −x₁).

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hopping::{hopping_all_routes, HoppingResult};
use crate::linalg::{self, C64};
use crate::model::{ModelConfig, ToleranceSpec};
use crate::radial::solve_ground_state;

const SEED: u64 = 0x6d61_6773_706c_6974;
/// Residuals below ~1e-13·‖H‖ are rounding noise in the matvec.
const RESIDUAL_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wells {
    None,
    Single,
    Double,
}

/// Rectangular grid covering both wells plus the margin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub x0: f64,
    pub y0: f64,
    /// |d|/h
    pub steps: usize,
    /// index of the site at the origin along axis 1 (and axis 2)
    pub origin_i: usize,
    pub origin_j: usize,
}

impl Grid {
    pub fn for_config(cfg: &ModelConfig) -> Self {
        let h = cfg.spacing();
        let steps = (cfg.separation / h).round() as usize;
        let pad = ((cfg.well.radius + cfg.grid.margin_lengths * cfg.ell()) / h).ceil() as usize;
        Grid {
            nx: steps + 2 * pad + 1,
            ny: 2 * pad + 1,
            h,
            x0: -(pad as f64) * h,
            y0: -(pad as f64) * h,
            steps,
            origin_i: pad,
            origin_j: pad,
        }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    /// Coordinates of site (i, j), from integer offsets so translates match.
    pub fn coords(&self, i: usize, j: usize) -> (f64, f64) {
        ((i as f64 - self.origin_i as f64) * self.h, (j as f64 - self.origin_j as f64) * self.h)
    }

    /// Bytes for the operator plus `vectors` work vectors.
    pub fn memory_mb(&self, vectors: usize) -> u64 {
        let n = self.len() as u64;
        (n * (5 * (16 + 8) + 8 + 8 + 16 * vectors as u64)).div_ceil(1 << 20)
    }
}

/// Area of [x0,x1]×[y0,y1] ∩ {|x| < a}, by integrating the chord length
/// piecewise in closed form.
pub fn disc_rect_area(a: f64, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let lo = x0.max(-a);
    let hi = x1.min(a);
    if lo >= hi {
        return 0.0;
    }
    // breakpoints where the chord half-height crosses y0 or y1
    let mut cuts = vec![lo, hi];
    for y in [y0, y1] {
        if y.abs() < a {
            let x = (a * a - y * y).sqrt();
            for c in [-x, x] {
                if c > lo && c < hi {
                    cuts.push(c);
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    let s = |x: f64| (a * a - x * x).max(0.0).sqrt();
    // ∫ √(a² − x²) dx
    let big_s = |x: f64| 0.5 * (x * s(x) + a * a * (x / a).clamp(-1.0, 1.0).asin());
    let mut area = 0.0;
    for w in cuts.windows(2) {
        let (p, q) = (w[0], w[1]);
        if q <= p {
            continue;
        }
        let m = 0.5 * (p + q);
        let sm = s(m);
        let top_is_chord = sm < y1;
        let bottom_is_chord = -sm > y0;
        let top = if top_is_chord { sm } else { y1 };
        let bottom = if bottom_is_chord { -sm } else { y0 };
        if top <= bottom {
            continue;
        }
        let chord = big_s(q) - big_s(p);
        let mut piece = 0.0;
        piece += if top_is_chord { chord } else { y1 * (q - p) };
        piece -= if bottom_is_chord { -chord } else { y0 * (q - p) };
        area += piece;
    }
    area
}

/// Fraction of the cell centred at integer offset (i, j)·h inside the disc.
fn cell_fraction(a: f64, h: f64, i: i64, j: i64) -> f64 {
    let (xc, yc) = (i as f64 * h, j as f64 * h);
    disc_rect_area(a, xc - 0.5 * h, xc + 0.5 * h, yc - 0.5 * h, yc + 0.5 * h) / (h * h)
}

/// Cell-averaged disc potential as a sparse map from integer offset to value.
fn well_stencil(a: f64, h: f64, depth: f64) -> HashMap<(i64, i64), f64> {
    let n = (a / h).ceil() as i64 + 1;
    let mut out = HashMap::new();
    for i in -n..=n {
        for j in -n..=n {
            let f = cell_fraction(a, h, i, j);
            if f > 0.0 {
                out.insert((i, j), depth * f);
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub grid: Grid,
    pub lambda: f64,
    pub b: f64,
    pub wells: Wells,
    /// λ²V at each site
    pub potential: Vec<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
    pub tolerances: ToleranceSpec,
}

impl DiscreteOperator {
    pub fn dimension(&self) -> usize {
        self.grid.len()
    }

    /// y = Hx, each row summed in stored order.
    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.par_chunks_mut(1024).enumerate().for_each(|(c, chunk)| {
            for (k, out) in chunk.iter_mut().enumerate() {
                let row = c * 1024 + k;
                let mut s = C64::new(0.0, 0.0);
                for p in self.row_ptr[row]..self.row_ptr[row + 1] {
                    s += self.vals[p] * x[self.cols[p]];
                }
                *out = s;
            }
        });
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        (self.row_ptr[row]..self.row_ptr[row + 1]).find(|&p| self.cols[p] == col).map(|p| self.vals[p]).unwrap_or(C64::new(0.0, 0.0))
    }

    /// Gershgorin bound on ‖H‖.
    pub fn norm_estimate(&self) -> f64 {
        (0..self.dimension()).map(|r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(|p| self.vals[p].norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Product of the Peierls factors exp(−ib∫A·dl) around the plaquette with
    /// lower-left corner (i, j), traversed counterclockwise.
    pub fn plaquette_phase(&self, i: usize, j: usize) -> C64 {
        let g = &self.grid;
        let h2 = g.h * g.h;
        // H[x, x+e] = −U_e/h², so U_e = −h²·H[x, x+e]
        let u = |a: usize, b: usize| -self.entry(a, b) * h2;
        let p00 = g.index(i, j);
        let p10 = g.index(i + 1, j);
        let p11 = g.index(i + 1, j + 1);
        let p01 = g.index(i, j + 1);
        u(p00, p10) * u(p10, p11) * u(p11, p01) * u(p01, p00)
    }

    /// ⟨x, Hx⟩
    pub fn expectation(&self, x: &[C64]) -> f64 {
        let mut y = vec![C64::new(0.0, 0.0); x.len()];
        self.apply(x, &mut y);
        linalg::dot(x, &y).re
    }
}

/// Operator with wells of the configured depth at 0 (single) or 0 and d (double).
pub fn build_hamiltonian(cfg: &ModelConfig, wells: Wells) -> Result<DiscreteOperator> {
    let depth = cfg.well.depth;
    let (d0, dd) = match wells {
        Wells::None => (0.0, 0.0),
        Wells::Single => (depth, 0.0),
        Wells::Double => (depth, depth),
    };
    build_with_depths(cfg, d0, dd, wells)
}

/// Operator with independent depths for the well at 0 and the well at d.
pub fn build_with_depths(cfg: &ModelConfig, depth0: f64, depth_d: f64, label: Wells) -> Result<DiscreteOperator> {
    cfg.require_valid()?;
    let grid = Grid::for_config(cfg);
    let needed = grid.memory_mb(24);
    if needed > cfg.grid.max_memory_mb {
        return Err(Error::MemoryCap { needed_mb: needed, cap_mb: cfg.grid.max_memory_mb });
    }
    let (lambda, b, h) = (cfg.lambda, cfg.b(), grid.h);
    let a = cfg.well.radius;
    let l2 = lambda * lambda;
    let mut potential = vec![0.0; grid.len()];
    let (oi, oj) = (grid.origin_i as i64, grid.origin_j as i64);
    for (depth, shift) in [(depth0, 0i64), (depth_d, grid.steps as i64)] {
        if depth == 0.0 {
            continue;
        }
        for (&(di, dj), &v) in &well_stencil(a, h, depth) {
            let (i, j) = (oi + shift + di, oj + dj);
            if i >= 0 && j >= 0 && (i as usize) < grid.nx && (j as usize) < grid.ny {
                potential[grid.index(i as usize, j as usize)] += l2 * v;
            }
        }
    }
    let inv_h2 = 1.0 / (h * h);
    let mut row_ptr = Vec::with_capacity(grid.len() + 1);
    let mut cols = Vec::with_capacity(5 * grid.len());
    let mut vals = Vec::with_capacity(5 * grid.len());
    row_ptr.push(0);
    for i in 0..grid.nx {
        for j in 0..grid.ny {
            let (x1, x2) = grid.coords(i, j);
            // neighbours in index order: (i−1, j), (i, j−1), self, (i, j+1), (i+1, j)
            if i > 0 {
                // conj of the forward link from (i−1, j), which has the same x₂
                cols.push(grid.index(i - 1, j));
                vals.push(-C64::from_polar(1.0, 0.5 * b * h * x2) * inv_h2);
            }
            if j > 0 {
                let (x1p, _) = grid.coords(i, j - 1);
                cols.push(grid.index(i, j - 1));
                vals.push(-C64::from_polar(1.0, -0.5 * b * h * x1p) * inv_h2);
            }
            cols.push(grid.index(i, j));
            vals.push(C64::new(4.0 * inv_h2 + potential[grid.index(i, j)], 0.0));
            if j + 1 < grid.ny {
                // ∫A·dl = −h x₁/2 upward
                cols.push(grid.index(i, j + 1));
                vals.push(-C64::from_polar(1.0, 0.5 * b * h * x1) * inv_h2);
            }
            if i + 1 < grid.nx {
                // ∫A·dl = h x₂/2 rightward
                cols.push(grid.index(i + 1, j));
                vals.push(-C64::from_polar(1.0, -0.5 * b * h * x2) * inv_h2);
            }
            row_ptr.push(cols.len());
        }
    }
    Ok(DiscreteOperator { grid, lambda, b, wells: label, potential, row_ptr, cols, vals, tolerances: cfg.tolerances.clone() })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenResult {
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<C64>>,
    pub residuals: Vec<f64>,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub norm_estimate: f64,
    pub shift: f64,
}

/// Modified Gram–Schmidt, twice. Columns with no new direction are refilled randomly.
fn orthonormalize(block: &mut [Vec<C64>], rng: &mut ChaCha8Rng) {
    for k in 0..block.len() {
        for _ in 0..2 {
            for q in 0..k {
                let (head, tail) = block.split_at_mut(k);
                let c = linalg::dot(&head[q], &tail[0]);
                linalg::axpy(-c, &head[q], &mut tail[0]);
            }
        }
        let n = linalg::norm(&block[k]);
        if !(n > 1e-300) {
            block[k] = random_vector(block[k].len(), rng);
            return orthonormalize(block, rng);
        }
        linalg::scale(C64::new(1.0 / n, 0.0), &mut block[k]);
    }
}

fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    (0..n).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
}

/// Rayleigh–Ritz on span(block); returns sorted Ritz values and the rotated block and H·block.
fn rayleigh_ritz(op: &DiscreteOperator, block: &[Vec<C64>]) -> (Vec<f64>, Vec<Vec<C64>>, Vec<Vec<C64>>) {
    let p = block.len();
    let n = op.dimension();
    let hb: Vec<Vec<C64>> = block
        .iter()
        .map(|v| {
            let mut y = vec![C64::new(0.0, 0.0); n];
            op.apply(v, &mut y);
            y
        })
        .collect();
    let g = nalgebra::DMatrix::<C64>::from_fn(p, p, |r, c| linalg::dot(&block[r], &hb[c]));
    let g = (&g + g.adjoint()) * C64::new(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::new(g);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let combine = |src: &[Vec<C64>], col: usize| {
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (r, v) in src.iter().enumerate() {
            linalg::axpy(eig.eigenvectors[(r, col)], v, &mut out);
        }
        out
    };
    let vals = order.iter().map(|&c| eig.eigenvalues[c]).collect();
    let x = order.iter().map(|&c| combine(block, c)).collect();
    let hx = order.iter().map(|&c| combine(&hb, c)).collect();
    (vals, x, hx)
}

/// k lowest eigenpairs above `shift` by shift-invert block iteration.
///
/// Each outer step solves (H − σ)Y = X by CG warm-started at X/(θ − σ) to
/// 0.1·target/max(1, θ − σ), then applies Rayleigh–Ritz. Converged when every wanted residual is
/// ≤ max(eigen_rel, 1e-12)·‖H‖.
pub fn lowest_eigenpairs(op: &DiscreteOperator, k: usize, shift: f64) -> Result<EigenResult> {
    let n = op.dimension();
    let p = k + 2;
    let tol = &op.tolerances;
    let hnorm = op.norm_estimate();
    let target = tol.eigen_rel.max(RESIDUAL_FLOOR) * hnorm;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut block: Vec<Vec<C64>> = (0..p).map(|_| random_vector(n, &mut rng)).collect();
    orthonormalize(&mut block, &mut rng);
    let (mut theta, mut x, _) = rayleigh_ritz(op, &block);
    if theta[0] <= shift {
        return Err(Error::InvalidConfig(format!("shift {shift} is not below the spectrum (Ritz value {})", theta[0])));
    }
    let shifted = |v: &[C64], out: &mut [C64]| {
        op.apply(v, out);
        linalg::axpy(C64::new(-shift, 0.0), v, out);
    };
    let mut inner = 0;
    for outer in 1..=tol.max_iterations.eigen_outer {
        let mut y = Vec::with_capacity(p);
        for c in 0..p {
            let mut guess = x[c].clone();
            linalg::scale(C64::new(1.0 / (theta[c] - shift), 0.0), &mut guess);
            // the warm start already has residual ‖r_c‖/(θ − σ); a fixed tolerance
            // would stop CG at zero steps for columns far from the shift
            let inner_tol = 0.1 * target / (theta[c] - shift).max(1.0);
            let stats = linalg::cg(&shifted, &x[c], &mut guess, inner_tol, tol.max_iterations.linear, None)?;
            inner += stats.iterations;
            y.push(guess);
        }
        orthonormalize(&mut y, &mut rng);
        let hx;
        (theta, x, hx) = rayleigh_ritz(op, &y);
        if theta[0] <= shift {
            return Err(Error::Consistency(format!("Ritz value {} fell below the shift {shift}", theta[0])));
        }
        let residuals: Vec<f64> = (0..k)
            .map(|c| {
                let mut r = hx[c].clone();
                linalg::axpy(C64::new(-theta[c], 0.0), &x[c], &mut r);
                linalg::norm(&r)
            })
            .collect();
        if std::env::var_os("MAGSPLIT_TRACE").is_some() {
            eprintln!("outer {outer}: θ={theta:?} res={residuals:?} inner={inner}");
        }
        if residuals.iter().all(|&r| r <= target) {
            x.truncate(k);
            theta.truncate(k);
            return Ok(EigenResult {
                eigenvalues: theta,
                eigenvectors: x,
                residuals,
                outer_iterations: outer,
                inner_iterations: inner,
                norm_estimate: hnorm,
                shift,
            });
        }
    }
    Err(Error::conv("shift-invert iteration", format!("{} outer steps, target residual {target:.3e}", tol.max_iterations.eigen_outer)))
}

/// Default shift: radial e₀ − 0.1λ with wells, λ − 0.1λ without.
pub fn default_shift(cfg: &ModelConfig, wells: Wells) -> Result<f64> {
    Ok(match wells {
        Wells::None => 0.9 * cfg.lambda,
        _ => solve_ground_state(cfg)?.e0 - 0.1 * cfg.lambda,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplittingReport {
    pub lambda: f64,
    pub separation: f64,
    pub spacing: f64,
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
    pub rho_abs: f64,
    /// gap/(2|ρ|)
    pub ratio: f64,
    /// exp(−λ(|d|² + 4√|v||d| + γ₀)/4) with γ₀ from the hopping lower bound
    pub lower_bound: f64,
    /// λ^{5/2} exp(−λ((|d|−a)² − a²)/4)
    pub upper_bound: f64,
    /// false when gap < 10·eigen_rel·|E₀|
    pub resolved: bool,
    pub residuals: Vec<f64>,
}

pub fn splitting(cfg: &ModelConfig) -> Result<SplittingReport> {
    let gs = solve_ground_state(cfg)?;
    let hop = hopping_all_routes(&gs, cfg.separation)?;
    splitting_with(cfg, gs.e0 - 0.1 * cfg.lambda, &hop)
}

fn splitting_with(cfg: &ModelConfig, shift: f64, hop: &HoppingResult) -> Result<SplittingReport> {
    let op = build_hamiltonian(cfg, Wells::Double)?;
    let eig = lowest_eigenpairs(&op, 2, shift)?;
    let (e0, e1) = (eig.eigenvalues[0], eig.eigenvalues[1]);
    let gap = e1 - e0;
    let (l, dist, a) = (cfg.lambda, cfg.separation, cfg.well.radius);
    let rho_abs = hop.log_abs_bessel.exp();
    let v = cfg.well.depth.abs();
    let lower = (-0.25 * l * (dist * dist + 4.0 * v.sqrt() * dist + hop.gamma0_effective)).exp();
    let upper = (2.5 * l.ln() - 0.25 * l * ((dist - a).powi(2) - a * a)).exp();
    Ok(SplittingReport {
        lambda: l,
        separation: dist,
        spacing: op.grid.h,
        e0,
        e1,
        gap,
        rho_abs,
        ratio: gap / (2.0 * rho_abs),
        lower_bound: lower,
        upper_bound: upper,
        resolved: gap >= 10.0 * cfg.tolerances.eigen_rel * e0.abs(),
        residuals: eig.residuals,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtrapolatedSplitting {
    pub levels: Vec<SplittingReport>,
    /// Gap at h → 0 from polynomial interpolation of ln(gap) in h².
    pub gap: f64,
    pub rho_abs: f64,
    pub ratio: f64,
}

/// The splitting on a ladder of spacings ℓ/divisions, extrapolated to h = 0.
pub fn splitting_extrapolated(cfg: &ModelConfig, divisions: &[f64]) -> Result<ExtrapolatedSplitting> {
    if divisions.is_empty() {
        return Err(Error::InvalidConfig("need at least one grid level".into()));
    }
    let gs = solve_ground_state(cfg)?;
    let hop = hopping_all_routes(&gs, cfg.separation)?;
    let shift = gs.e0 - 0.1 * cfg.lambda;
    let mut levels = Vec::new();
    for &div in divisions {
        let mut c = cfg.clone();
        c.grid.spacing = None;
        c.grid.divisions = div;
        let rep = splitting_with(&c, shift, &hop)?;
        if !(rep.gap > 0.0) {
            return Err(Error::Consistency(format!("non-positive gap {} at ℓ/{div}", rep.gap)));
        }
        levels.push(rep);
    }
    let pts: Vec<(f64, f64)> = levels.iter().map(|r| (r.spacing * r.spacing, r.gap.ln())).collect();
    let gap = neville_at_zero(&pts).exp();
    let rho_abs = hop.log_abs_bessel.exp();
    Ok(ExtrapolatedSplitting { levels, gap, rho_abs, ratio: gap / (2.0 * rho_abs) })
}

/// Value at x = 0 of the interpolating polynomial through `pts`.
pub fn neville_at_zero(pts: &[(f64, f64)]) -> f64 {
    let mut p: Vec<f64> = pts.iter().map(|q| q.1).collect();
    let n = p.len();
    for m in 1..n {
        for i in 0..n - m {
            let (xi, xj) = (pts[i].0, pts[i + m].0);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p[0]
}

/// Shift by `steps` cells along axis 1 with the gauge factor e^{−ibδx₂/2},
/// δ = steps·h. Sites shifted in from outside the grid are zero.
pub fn magnetic_translate(state: &[C64], grid: &Grid, b: f64, steps: i64) -> Result<Vec<C64>> {
    if state.len() != grid.len() {
        return Err(Error::Domain(format!("state has {} entries, grid {}", state.len(), grid.len())));
    }
    let delta = steps as f64 * grid.h;
    let mut out = vec![C64::new(0.0, 0.0); grid.len()];
    for i in 0..grid.nx {
        let src = i as i64 - steps;
        if src < 0 || src >= grid.nx as i64 {
            continue;
        }
        for j in 0..grid.ny {
            let (_, x2) = grid.coords(i, j);
            out[grid.index(i, j)] = C64::from_polar(1.0, -0.5 * b * delta * x2) * state[grid.index(src as usize, j)];
        }
    }
    Ok(out)
}

/// As `magnetic_translate` for a distance, rejecting non-multiples of h.
pub fn magnetic_translate_by(state: &[C64], grid: &Grid, b: f64, dist: f64) -> Result<Vec<C64>> {
    let s = dist / grid.h;
    if (s - s.round()).abs() > 1e-9 * s.abs().max(1.0) {
        return Err(Error::Domain(format!("shift {dist} is not a multiple of h = {}", grid.h)));
    }
    magnetic_translate(state, grid, b, s.round() as i64)
}

/// Samples a radial profile onto the grid around the origin.
pub fn sample_radial(grid: &Grid, profile: impl Fn(f64) -> Result<f64>) -> Result<Vec<C64>> {
    let mut out = vec![C64::new(0.0, 0.0); grid.len()];
    for i in 0..grid.nx {
        for j in 0..grid.ny {
            let (x1, x2) = grid.coords(i, j);
            out[grid.index(i, j)] = C64::new(profile((x1 * x1 + x2 * x2).sqrt())?, 0.0);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridDumpMeta {
    pub nx: usize,
    pub ny: usize,
    pub spacing: f64,
    /// coordinates of site (0, 0)
    pub origin: [f64; 2],
    /// little-endian f64 pairs (re, im), index i·ny + j
    pub layout: String,
}

/// Writes `<stem>.bin` and `<stem>.json`.
pub fn write_grid_dump(stem: &Path, grid: &Grid, state: &[C64]) -> Result<()> {
    let mut w = BufWriter::new(File::create(stem.with_extension("bin"))?);
    for z in state {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    w.flush()?;
    let meta = GridDumpMeta {
        nx: grid.nx,
        ny: grid.ny,
        spacing: grid.h,
        origin: [grid.coords(0, 0).0, grid.coords(0, 0).1],
        layout: "complex128 little-endian (re, im), row-major with axis-2 index fastest".into(),
    };
    std::fs::write(stem.with_extension("json"), serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

/// ∫ over the full disc of the cell fractions, which must equal πa².
pub fn well_area(a: f64, h: f64) -> f64 {
    well_stencil(a, h, 1.0).values().sum::<f64>() * h * h
}
