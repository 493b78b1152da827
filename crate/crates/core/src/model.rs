//! Configuration types shared by every solver.
//!
//! Units: ħ = c = 2mₑ = qₑ = 1. The magnetic length is ℓ = √(2/λ).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WellShape {
    Disc,
}

/// Piecewise-constant radial well: v₀(r) = depth for r < radius, else 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WellSpec {
    #[serde(default = "default_shape")]
    pub shape: WellShape,
    pub depth: f64,
    pub radius: f64,
}

fn default_shape() -> WellShape {
    WellShape::Disc
}

impl WellSpec {
    pub fn disc(depth: f64, radius: f64) -> Self {
        WellSpec { shape: WellShape::Disc, depth, radius }
    }

    pub fn potential(&self, r: f64) -> f64 {
        if r < self.radius {
            self.depth
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Dirichlet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Explicit spacing h. When absent, h is derived from `divisions`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<f64>,
    /// h ≈ ℓ/divisions, rounded down so that |d|/h is an integer.
    #[serde(default = "default_divisions")]
    pub divisions: f64,
    #[serde(default = "default_margin")]
    pub margin_lengths: f64,
    #[serde(default = "default_boundary")]
    pub boundary: Boundary,
    #[serde(default = "default_memory")]
    pub max_memory_mb: u64,
}

fn default_divisions() -> f64 {
    8.0
}
fn default_margin() -> f64 {
    8.0
}
fn default_boundary() -> Boundary {
    Boundary::Dirichlet
}
fn default_memory() -> u64 {
    4096
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            spacing: None,
            divisions: default_divisions(),
            margin_lengths: default_margin(),
            boundary: Boundary::Dirichlet,
            max_memory_mb: default_memory(),
        }
    }
}

impl GridSpec {
    /// Grid spacing for a given coupling and separation.
    pub fn spacing_for(&self, lambda: f64, separation: f64) -> f64 {
        match self.spacing {
            Some(h) => h,
            None => {
                let target = magnetic_length(lambda) / self.divisions;
                separation / (separation / target).ceil()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterationCaps {
    #[serde(default = "cap_bisection")]
    pub bisection: usize,
    #[serde(default = "cap_eigen")]
    pub eigen_outer: usize,
    #[serde(default = "cap_linear")]
    pub linear: usize,
    #[serde(default = "cap_quad")]
    pub quadrature_intervals: usize,
}

fn cap_bisection() -> usize {
    200
}
fn cap_eigen() -> usize {
    300
}
fn cap_linear() -> usize {
    50_000
}
fn cap_quad() -> usize {
    4000
}

impl Default for IterationCaps {
    fn default() -> Self {
        IterationCaps { bisection: cap_bisection(), eigen_outer: cap_eigen(), linear: cap_linear(), quadrature_intervals: cap_quad() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default = "tol_quad")]
    pub quadrature_rel: f64,
    #[serde(default = "tol_eigen")]
    pub eigen_rel: f64,
    #[serde(default = "tol_match")]
    pub match_rel: f64,
    #[serde(default)]
    pub max_iterations: IterationCaps,
}

fn tol_quad() -> f64 {
    1e-10
}
fn tol_eigen() -> f64 {
    1e-8
}
fn tol_match() -> f64 {
    1e-10
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        ToleranceSpec {
            quadrature_rel: tol_quad(),
            eigen_rel: tol_eigen(),
            match_rel: tol_match(),
            max_iterations: IterationCaps::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub lambda: f64,
    /// Field strength; `None` means b = λ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    pub well: WellSpec,
    /// |d|; the second well sits at d = |d|e₁.
    pub separation: f64,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub tolerances: ToleranceSpec,
}

impl ModelConfig {
    /// Disc well with default grid and tolerances.
    pub fn reference(lambda: f64, depth: f64, radius: f64, separation: f64) -> Self {
        ModelConfig {
            lambda,
            b: None,
            well: WellSpec::disc(depth, radius),
            separation,
            grid: GridSpec::default(),
            tolerances: ToleranceSpec::default(),
        }
    }

    pub fn b(&self) -> f64 {
        self.b.unwrap_or(self.lambda)
    }

    pub fn ell(&self) -> f64 {
        magnetic_length(self.lambda)
    }

    pub fn spacing(&self) -> f64 {
        self.grid.spacing_for(self.lambda, self.separation)
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        ModelConfig { lambda, ..self.clone() }
    }

    pub fn with_separation(&self, separation: f64) -> Self {
        ModelConfig { separation, ..self.clone() }
    }

    /// Validation that turns the first violation into an error.
    pub fn require_valid(&self) -> Result<ValidationReport> {
        let report = validate(self);
        if report.is_valid() {
            Ok(report)
        } else {
            Err(Error::InvalidConfig(report.violations.join("; ")))
        }
    }
}

pub fn magnetic_length(lambda: f64) -> f64 {
    (2.0 / lambda).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    /// |d| > 4(√|v_min| + a): the spacing under which the bound checks apply.
    pub strict_spacing: bool,
    pub strict_threshold: f64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lists every violated invariant. Never fails.
pub fn validate(cfg: &ModelConfig) -> ValidationReport {
    let mut v = Vec::new();
    let finite = |x: f64| x.is_finite();
    if !(finite(cfg.lambda) && cfg.lambda > 0.0) {
        v.push(format!("lambda must be > 0 (got {})", cfg.lambda));
    }
    if let Some(b) = cfg.b {
        if !(finite(b) && b > 0.0) {
            v.push(format!("b must be > 0 (got {b})"));
        }
    }
    let w = &cfg.well;
    if !(finite(w.depth) && w.depth < 0.0) {
        v.push(format!("well.depth must be < 0 (got {})", w.depth));
    }
    if !(finite(w.radius) && w.radius > 0.0) {
        v.push(format!("well.radius must be > 0 (got {})", w.radius));
    }
    if !(finite(cfg.separation) && cfg.separation > 2.0 * w.radius) {
        v.push(format!("separation {} must exceed 2·radius = {}: wells overlap", cfg.separation, 2.0 * w.radius));
    }
    let g = &cfg.grid;
    if !(finite(g.margin_lengths) && g.margin_lengths >= 4.0) {
        v.push(format!("grid.margin_lengths must be ≥ 4 (got {})", g.margin_lengths));
    }
    if g.spacing.is_none() && !(finite(g.divisions) && g.divisions >= 8.0) {
        v.push(format!("grid.divisions must be ≥ 8 (got {})", g.divisions));
    }
    if cfg.lambda > 0.0 && cfg.separation > 0.0 {
        let h = cfg.spacing();
        let ell = cfg.ell();
        if !(finite(h) && h > 0.0) {
            v.push(format!("grid spacing must be > 0 (got {h})"));
        } else {
            if h > ell / 8.0 * (1.0 + 1e-12) {
                v.push(format!("grid spacing {h} exceeds ℓ/8 = {}", ell / 8.0));
            }
            let steps = cfg.separation / h;
            if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
                v.push(format!("separation {} is not a multiple of spacing {h}", cfg.separation));
            }
        }
    }
    let t = &cfg.tolerances;
    for (name, x) in [("quadrature_rel", t.quadrature_rel), ("eigen_rel", t.eigen_rel), ("match_rel", t.match_rel)] {
        if !(finite(x) && x > 0.0) {
            v.push(format!("tolerances.{name} must be > 0 (got {x})"));
        }
    }
    let m = &t.max_iterations;
    if m.bisection == 0 || m.eigen_outer == 0 || m.linear == 0 || m.quadrature_intervals == 0 {
        v.push("tolerances.max_iterations entries must be > 0".to_string());
    }
    let threshold = 4.0 * (w.depth.abs().sqrt() + w.radius);
    ValidationReport { violations: v, strict_spacing: cfg.separation > threshold, strict_threshold: threshold }
}
