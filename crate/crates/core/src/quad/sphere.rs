//! Integrals over the Riemann sphere of integrands with integrable `1/|z−p|`
//! singularities at finitely many points and decay at infinity.
//!
//! The sphere is split by a C^∞ partition of unity:
//!
//! * a disk of radius `r` around every singular point `p`, integrated in
//!   polar coordinates `(ρ, θ)` where `ρ·f` is smooth;
//! * the region `|z| > R_in`, integrated in the chart `w = 1/z`, again in
//!   polar coordinates about `w = 0`;
//! * the remainder, supported in `|z| ≤ R`, integrated by adaptive tensor
//!   cubature on `[−R, R]²`.
//!
//! Each weight is 1 on an inner region and decays smoothly to 0, so every
//! piece has a smooth integrand and the pieces sum to the whole.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gk::{adaptive_1d_with_abs, adaptive_2d};
use super::{Estimate, Method, QuadConfig};
use crate::error::{Error, Result};
use crate::forms::LogForm1;
use crate::geom::ProjPoint;

/// C^∞ step from 0 (x ≤ 0) to 1 (x ≥ 1).
fn smoothstep(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / x).exp();
        let b = (-1.0 / (1.0 - x)).exp();
        a / (a + b)
    }
}

struct Layout {
    points: Vec<Complex64>,
    r: f64,
    r_in: f64,
    r_out: f64,
}

impl Layout {
    fn new(points: &[Complex64], cfg: &QuadConfig) -> Result<Self> {
        let m = points.iter().map(|p| p.norm()).fold(0.0, f64::max);
        let r_out = cfg.chart_radius.unwrap_or(2.0 * m + 1.0);
        if r_out <= m * (1.0 + 1e-9) {
            return Err(Error::Input(format!("chart radius {r_out} must exceed the largest pole modulus {m}")));
        }
        let mut dmin = f64::INFINITY;
        for (i, p) in points.iter().enumerate() {
            for q in &points[..i] {
                dmin = dmin.min((p - q).norm());
            }
        }
        let r = (cfg.patch_radius_fraction * dmin).min((r_out - m) / 3.0);
        let r_in = m + 0.5 * (r_out - m);
        Ok(Layout { points: points.to_vec(), r, r_in, r_out })
    }

    fn patch_weight(&self, rho: f64) -> f64 {
        1.0 - smoothstep((rho - 0.5 * self.r) / (0.5 * self.r))
    }

    fn outer_weight(&self, modulus: f64) -> f64 {
        smoothstep((modulus - self.r_in) / (self.r_out - self.r_in))
    }

    fn remainder_weight(&self, z: Complex64) -> f64 {
        let mut w = 1.0 - self.outer_weight(z.norm());
        for p in &self.points {
            let d = (z - p).norm();
            if d < self.r {
                w -= self.patch_weight(d);
                break;
            }
        }
        w
    }
}

/// Periodic trapezoid rule in θ with doubling; returns the integral, the
/// integral of `|f|` and the last change (an error indicator).
fn ring(f: &dyn Fn(f64) -> Complex64, rel_tol: f64, evals: &AtomicU64) -> (Complex64, f64, f64) {
    let mut n = 32usize;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs: f64 = 0.0;
    for k in 0..n {
        let v = f(2.0 * PI * k as f64 / n as f64);
        sum += v;
        abs += v.norm();
    }
    let mut count = n as u64;
    let mut prev = sum * (2.0 * PI / n as f64);
    let mut change = f64::INFINITY;
    while n < 8192 {
        let mut add = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let v = f(2.0 * PI * (k as f64 + 0.5) / n as f64);
            add += v;
            abs += v.norm();
        }
        count += n as u64;
        sum += add;
        n *= 2;
        let cur = sum * (2.0 * PI / n as f64);
        change = (cur - prev).norm();
        prev = cur;
        let scale = abs * (2.0 * PI / n as f64);
        if change <= (1e-3 * rel_tol * scale).max(1e-15 * scale) {
            break;
        }
    }
    evals.fetch_add(count, Ordering::Relaxed);
    (prev, abs * (2.0 * PI / n as f64), change)
}

type Integrand<'a> = dyn Fn(Complex64) -> Complex64 + Sync + 'a;

struct Part {
    value: Complex64,
    error: f64,
}

fn polar_part(
    radial: &dyn Fn(f64) -> (Complex64, f64),
    breaks: &[f64],
    cfg: &QuadConfig,
    ring_residual: &Mutex<f64>,
    span: f64,
) -> Result<Part> {
    let r = adaptive_1d_with_abs(radial, breaks, cfg.rel_tol, 0.0, cfg.max_subdivisions)?;
    let res = *ring_residual.lock().unwrap();
    Ok(Part { value: r.value, error: r.error + res * span })
}

/// `∫_{ℂ} f dA` for `f` with integrable singularities at `points` only.
pub(crate) fn sphere_area_integral(f: &Integrand<'_>, points: &[Complex64], cfg: &QuadConfig) -> Result<(Complex64, f64, u64)> {
    cfg.validate()?;
    let lay = Layout::new(points, cfg)?;
    let evals = AtomicU64::new(0);

    #[derive(Clone, Copy)]
    enum Job {
        Patch(usize),
        Outer,
        Remainder,
    }
    let mut jobs: Vec<Job> = (0..lay.points.len()).map(Job::Patch).collect();
    jobs.push(Job::Outer);
    jobs.push(Job::Remainder);

    let run = |job: Job| -> Result<Part> {
        match job {
            Job::Patch(i) => {
                let p = lay.points[i];
                let worst = Mutex::new(0.0f64);
                let radial = |rho: f64| {
                    let w = lay.patch_weight(rho);
                    if w == 0.0 {
                        return (Complex64::new(0.0, 0.0), 0.0);
                    }
                    let (t, a, ch) = ring(&|th| f(p + Complex64::from_polar(rho, th)), cfg.rel_tol, &evals);
                    let mut g = worst.lock().unwrap();
                    *g = g.max(ch * rho * w);
                    (t * (rho * w), a * rho * w)
                };
                polar_part(&radial, &[0.0, 0.5 * lay.r, lay.r], cfg, &worst, lay.r)
            }
            Job::Outer => {
                let worst = Mutex::new(0.0f64);
                let radial = |rho: f64| {
                    let w = lay.outer_weight(1.0 / rho);
                    if w == 0.0 {
                        return (Complex64::new(0.0, 0.0), 0.0);
                    }
                    let (t, a, ch) = ring(&|th| f(Complex64::from_polar(1.0 / rho, -th)), cfg.rel_tol, &evals);
                    let jac = w / (rho * rho * rho);
                    let mut g = worst.lock().unwrap();
                    *g = g.max(ch * jac);
                    (t * jac, a * jac)
                };
                polar_part(&radial, &[0.0, 1.0 / lay.r_out, 1.0 / lay.r_in], cfg, &worst, 1.0 / lay.r_in)
            }
            Job::Remainder => {
                let rr = lay.r_out;
                let n = 4;
                let h = 2.0 * rr / n as f64;
                let rects = (0..n * n)
                    .map(|k| {
                        let (i, j) = ((k % n) as f64, (k / n) as f64);
                        (-rr + i * h, -rr + (i + 1.0) * h, -rr + j * h, -rr + (j + 1.0) * h)
                    })
                    .collect();
                let g = |x: f64, y: f64| {
                    let z = Complex64::new(x, y);
                    let w = lay.remainder_weight(z);
                    if w <= 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        f(z) * w
                    }
                };
                let r = adaptive_2d(g, rects, cfg.rel_tol, 0.0, cfg.max_subdivisions)?;
                evals.fetch_add(r.evals, Ordering::Relaxed);
                Ok(Part { value: r.value, error: r.error })
            }
        }
    };

    let parts: Vec<Result<Part>> = jobs.par_iter().map(|&j| run(j)).collect();
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for p in parts {
        let p = p?;
        value += p.value;
        error += p.error;
    }
    Ok((value, error, evals.load(Ordering::Relaxed)))
}

fn check_pair(nu: &LogForm1, omega: &LogForm1) -> Result<Vec<Complex64>> {
    for (name, f) in [("nu", nu), ("omega", omega)] {
        if !f.is_logarithmic() {
            return Err(Error::NotLogarithmic(format!("{name} has a higher-order pole at infinity")));
        }
    }
    let a: Vec<Complex64> = nu.finite_poles().collect();
    let b: Vec<Complex64> = omega.finite_poles().collect();
    for p in &a {
        if b.iter().any(|q| ProjPoint::Finite(*q).approx_eq(&ProjPoint::Finite(*p))) {
            return Err(Error::OverlappingPoles(format!("{p}")));
        }
    }
    if nu.has_pole_at_infinity() && omega.has_pole_at_infinity() {
        return Err(Error::OverlappingPoles("inf".into()));
    }
    let mut pts = a;
    pts.extend(b);
    Ok(pts)
}

/// `∫_{ℙ¹(ℂ)} ν ∧ ω̄` for logarithmic forms with disjoint poles.
pub fn integrate_sphere(nu: &LogForm1, omega: &LogForm1, cfg: &QuadConfig) -> Result<Estimate> {
    let pts = check_pair(nu, omega)?;
    let f = |z: Complex64| nu.eval(z) * omega.eval(z).conj();
    let (v, e, n) = sphere_area_integral(&f, &pts, cfg)?;
    // dz ∧ dz̄ = −2i dx∧dy
    let k = Complex64::new(0.0, -2.0);
    Ok(Estimate { value: v * k, abs_error: 2.0 * e, samples_or_evals: n, method: Method::Sphere2d })
}

/// Exact value of `∫ ν ∧ ω̄`: `2πi Σ cᵢ d̄ⱼ log|aᵢ − bⱼ|²` over finite poles.
///
/// Stokes' theorem with the primitive `Σ d̄ⱼ log|z − bⱼ|²` of `ω̄`, which
/// vanishes at infinity because the residues of `ω` sum to zero.
pub fn sphere_pairing_closed_form(nu: &LogForm1, omega: &LogForm1) -> Result<Complex64> {
    check_pair(nu, omega)?;
    let mut s = Complex64::new(0.0, 0.0);
    for t in nu.terms() {
        for u in omega.terms() {
            s += t.residue * u.residue.conj() * (t.pole - u.pole).norm_sqr().ln();
        }
    }
    Ok(s * Complex64::new(0.0, 2.0 * PI))
}

/// A real rational function `ψ(s) = P(s)/Q(s)` of `s = |z|²`; coefficients
/// in ascending order of degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialRational {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
}

fn poly(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * s + a)
}

fn dpoly(c: &[f64], s: f64) -> f64 {
    c.iter().enumerate().skip(1).rev().fold(0.0, |acc, (k, &a)| acc * s + k as f64 * a)
}

fn degree(c: &[f64]) -> Option<usize> {
    c.iter().rposition(|&a| a != 0.0)
}

impl RadialRational {
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        let r = RadialRational { num, den };
        r.check_bounded()?;
        Ok(r)
    }

    pub fn constant(c: f64) -> Self {
        RadialRational { num: vec![c], den: vec![1.0] }
    }

    /// `s/(1+s)`.
    pub fn lefschetz() -> Self {
        RadialRational { num: vec![0.0, 1.0], den: vec![1.0, 1.0] }
    }

    pub fn check_bounded(&self) -> Result<()> {
        let dd = degree(&self.den).ok_or_else(|| Error::UnboundedTestFunction("zero denominator".into()))?;
        if self.num.iter().chain(&self.den).any(|c| !c.is_finite()) {
            return Err(Error::Input("non-finite coefficient".into()));
        }
        if degree(&self.num).is_some_and(|dn| dn > dd) {
            return Err(Error::UnboundedTestFunction("numerator degree exceeds denominator degree".into()));
        }
        // Q(s)/(1+s)^deg on s = x/(1−x), x ∈ [0, 1]: bounded, must keep its sign
        let n = 20000;
        let mut first = 0.0;
        let mut min_abs = f64::INFINITY;
        let mut max_abs: f64 = 0.0;
        for k in 0..=n {
            let x = k as f64 / n as f64;
            let v = if k == n {
                self.den[dd]
            } else {
                let s = x / (1.0 - x);
                poly(&self.den, s) / (1.0 + s).powi(dd as i32)
            };
            if k == 0 {
                first = v;
            }
            if v * first <= 0.0 {
                return Err(Error::UnboundedTestFunction("denominator vanishes on [0, ∞)".into()));
            }
            min_abs = min_abs.min(v.abs());
            max_abs = max_abs.max(v.abs());
        }
        if min_abs <= 1e-10 * max_abs {
            return Err(Error::UnboundedTestFunction("denominator nearly vanishes on [0, ∞)".into()));
        }
        Ok(())
    }

    pub fn eval(&self, s: f64) -> f64 {
        poly(&self.num, s) / poly(&self.den, s)
    }

    pub fn derivative(&self, s: f64) -> f64 {
        let (p, q) = (poly(&self.num, s), poly(&self.den, s));
        (dpoly(&self.num, s) * q - p * dpoly(&self.den, s)) / (q * q)
    }

    pub fn at(&self, p: &ProjPoint) -> f64 {
        match p {
            ProjPoint::Finite(z) => self.eval(z.norm_sqr()),
            ProjPoint::Infinity => {
                let dd = degree(&self.den).unwrap_or(0);
                match degree(&self.num) {
                    Some(dn) if dn == dd => self.num[dn] / self.den[dd],
                    _ => 0.0,
                }
            }
        }
    }
}

/// `(1/2πi) ∫ ω ∧ d(ψ∘conj)` for a radial test function `ψ`, together with
/// the residue predictor `Σ_p res_p(ω) ψ(p)`.
pub fn cauchy_stokes_pairing(omega: &LogForm1, psi: &RadialRational, cfg: &QuadConfig) -> Result<(Estimate, Complex64)> {
    psi.check_bounded()?;
    if !omega.is_logarithmic() {
        return Err(Error::NotLogarithmic("omega has a higher-order pole at infinity".into()));
    }
    let pts: Vec<Complex64> = omega.finite_poles().collect();
    // ω ∧ dψ = g·z·ψ′(|z|²) dz∧dz̄ = −2i g z ψ′ dA
    let f = |z: Complex64| omega.eval(z) * z * psi.derivative(z.norm_sqr());
    let (v, e, n) = sphere_area_integral(&f, &pts, cfg)?;
    let value = v * (-1.0 / PI);
    let mut predicted = Complex64::new(0.0, 0.0);
    for p in omega.poles() {
        predicted += omega.residue_coeff(&p) * psi.at(&p);
    }
    Ok((Estimate { value, abs_error: e / PI, samples_or_evals: n, method: Method::Sphere2d }, predicted))
}
