//! Numerical integration engines.
//!
//! * [`integrate_path`] — adaptive Gauss–Kronrod along piecewise paths;
//! * [`integrate_sphere`] — `∫_{ℙ¹(ℂ)} ν ∧ ω̄` via a smooth partition of
//!   unity: polar patches at the poles, a `w = 1/z` patch at infinity and
//!   adaptive cubature on what is left;
//! * [`integrate_mc`] — importance-sampled Monte Carlo over `ℂⁿ`.

pub mod gk;
mod mc;
mod path;
mod sphere;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::complex_serde;
use num_complex::Complex64;

pub use mc::{integrate_mc, integrate_mc_diagnostics, McDiagnostics};
pub use path::{integrate_path, integrate_path_conj};
pub use sphere::{cauchy_stokes_pairing, integrate_sphere, sphere_pairing_closed_form, RadialRational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Adaptive1d,
    Sphere2d,
    MonteCarlo,
}

/// A numerical result with its error bound (or standard error for Monte
/// Carlo).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    #[serde(with = "complex_serde")]
    pub value: Complex64,
    pub abs_error: f64,
    pub samples_or_evals: u64,
    pub method: Method,
}

impl Estimate {
    pub fn scaled(&self, c: Complex64) -> Estimate {
        Estimate { value: self.value * c, abs_error: self.abs_error * c.norm(), ..*self }
    }

    /// Whether `truth` lies within `k` error bounds of the value.
    pub fn brackets(&self, truth: Complex64, k: f64) -> bool {
        (self.value - truth).norm() <= k * self.abs_error
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub guard_distance: f64,
    /// Radius separating the `z` and `w = 1/z` charts; `None` picks
    /// `2·max|pole| + 1`.
    pub chart_radius: Option<f64>,
    pub patch_radius_fraction: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig::path_default()
    }
}

impl QuadConfig {
    pub fn path_default() -> Self {
        QuadConfig {
            rel_tol: 1e-10,
            max_subdivisions: 2000,
            guard_distance: 1e-6,
            chart_radius: None,
            patch_radius_fraction: 0.45,
        }
    }

    pub fn sphere_default() -> Self {
        QuadConfig { rel_tol: 1e-6, max_subdivisions: 4000, ..QuadConfig::path_default() }
    }

    pub fn with_rel_tol(mut self, tol: f64) -> Self {
        self.rel_tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.rel_tol > 0.0
            && self.rel_tol.is_finite()
            && self.max_subdivisions >= 1
            && self.guard_distance >= 0.0
            && self.patch_radius_fraction > 0.0
            && self.patch_radius_fraction <= 0.5
            && self.chart_radius.is_none_or(|r| r > 0.0 && r.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::Input(format!("invalid quadrature configuration {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub chunks: usize,
    /// Extra proposal centers, per coordinate, added to those read off the
    /// forms' singular loci.
    #[serde(with = "crate::json::complex_matrix_serde")]
    pub proposal_centers: Vec<Vec<Complex64>>,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { samples: 1_000_000, seed: 1, chunks: 64, proposal_centers: Vec::new() }
    }
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        McConfig { samples, seed, ..McConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.chunks < 2 || self.samples < self.chunks as u64 {
            return Err(Error::Input(format!(
                "need samples ≥ chunks ≥ 2 (samples = {}, chunks = {})",
                self.samples, self.chunks
            )));
        }
        Ok(())
    }
}

/// Runs `f` on a pool capped by `SVPERIOD_THREADS`, if set.
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let cap = std::env::var("SVPERIOD_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0);
    match cap.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}
