//! Elliptic curves `ℂ/ω₁(ℤ + τℤ)`: Eisenstein q-series, periods and
//! quasi-periods of `dx/y`, `x dx/y` from `𝔾₂`, and the single-valued
//! period matrix in closed form.
//!
//! The curve is `y² = 4x³ − ux − v` with `u = 20𝔾₄/λ⁴`, `v = 7𝔾₆/(3λ⁶)`,
//! `ω₁ = 2πiλ`, and quasi-periods `η = ∫ x dx/y` (so `η = −2ζ(ω/2)` for the
//! Weierstrass `ζ`).

pub mod agm;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::complex_serde;
use crate::quad::gk::adaptive_2d;
use crate::svcore::{sv_matrix, PeriodMatrix, SvMatrix};

/// Iteration cap for the q-series; reached only for `Im τ ≲ 1e-5`.
const MAX_TERMS: u64 = 5_000_000;

fn two_pi_i() -> Complex64 {
    Complex64::new(0.0, 2.0 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauPoint {
    #[serde(with = "complex_serde")]
    pub tau: Complex64,
    #[serde(with = "complex_serde")]
    pub lambda: Complex64,
}

impl TauPoint {
    pub fn new(tau: Complex64, lambda: Complex64) -> Result<Self> {
        check_tau(tau)?;
        if lambda.norm() == 0.0 || !lambda.is_finite() {
            return Err(Error::Input(format!("λ must be finite and nonzero, got {lambda}")));
        }
        Ok(TauPoint { tau, lambda })
    }
}

fn check_tau(tau: Complex64) -> Result<()> {
    if !tau.is_finite() || tau.im <= 0.0 {
        return Err(Error::NotConvergent(tau.im));
    }
    Ok(())
}

fn divisor_power_sum(n: u64, k: i32) -> f64 {
    let mut s = 0.0;
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            s += (d as f64).powi(k);
            let e = n / d;
            if e != d {
                s += (e as f64).powi(k);
            }
        }
        d += 1;
    }
    s
}

/// `𝔾_k(τ) = c_k + Σ σ_{k−1}(n) qⁿ` with `c₂ = −1/24`, `c₄ = 1/240`,
/// `c₆ = −1/504`, summed until the geometric tail bound drops below `eps`.
pub fn eisenstein(k: u32, tau: Complex64, eps: f64) -> Result<Complex64> {
    let constant = match k {
        2 => -1.0 / 24.0,
        4 => 1.0 / 240.0,
        6 => -1.0 / 504.0,
        _ => return Err(Error::Input(format!("weight must be 2, 4 or 6, got {k}"))),
    };
    check_tau(tau)?;
    if !(eps > 0.0) {
        return Err(Error::Input(format!("eps must be positive, got {eps}")));
    }
    // σ_{k−1}(n) ≤ n^k bounds every term by n^k rⁿ
    let ln_r = -2.0 * PI * tau.im;
    let kf = k as f64;
    let mut sum = Complex64::new(constant, 0.0);
    for n in 1..=MAX_TERMS {
        let q_n = (two_pi_i() * tau * n as f64).exp();
        sum += q_n * divisor_power_sum(n, k as i32 - 1);
        let m = (n + 1) as f64;
        let ratio = ((m + 1.0) / m).powf(kf) * ln_r.exp();
        let ln_head = kf * m.ln() + m * ln_r;
        if ratio < 1.0 && ln_head - (1.0 - ratio).ln() < eps.ln() {
            return Ok(sum);
        }
    }
    Err(Error::NotConvergent(tau.im))
}

/// `𝔾₂*(τ) = 𝔾₂(τ) + 1/(8π Im τ)`.
pub fn g2star(tau: Complex64, eps: f64) -> Result<Complex64> {
    Ok(eisenstein(2, tau, eps)? + 1.0 / (8.0 * PI * tau.im))
}

/// `|𝔾₂*(−1/τ) − τ²𝔾₂*(τ)|`.
pub fn g2star_modularity_residual(tau: Complex64, eps: f64) -> Result<f64> {
    Ok((g2star(-tau.inv(), eps)? - tau * tau * g2star(tau, eps)?).norm())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipticCurveData {
    pub point: TauPoint,
    #[serde(with = "complex_serde")]
    pub omega1: Complex64,
    #[serde(with = "complex_serde")]
    pub omega2: Complex64,
    #[serde(with = "complex_serde")]
    pub eta1: Complex64,
    #[serde(with = "complex_serde")]
    pub eta2: Complex64,
    #[serde(with = "complex_serde")]
    pub g2q: Complex64,
    #[serde(with = "complex_serde")]
    pub g4q: Complex64,
    #[serde(with = "complex_serde")]
    pub g6q: Complex64,
    /// `𝔪(τ) = −8π Im τ 𝔾₂*(τ)`
    #[serde(with = "complex_serde")]
    pub m_tau: Complex64,
    /// Coefficients of `y² = 4x³ − ux − v` in the gauge fixed by `λ`.
    #[serde(with = "complex_serde")]
    pub u: Complex64,
    #[serde(with = "complex_serde")]
    pub v: Complex64,
    /// `|ω₁η₂ − η₁ω₂ − 2πi|`
    pub legendre_residual: f64,
}

/// Periods from `τ` and `λ`: `η₁` from Fricke's formula for `𝔾₂`, `η₂` from
/// Legendre's relation.
pub fn curve_data(p: &TauPoint, eps: f64) -> Result<EllipticCurveData> {
    let (tau, lambda) = (p.tau, p.lambda);
    let g2q = eisenstein(2, tau, eps)?;
    let g4q = eisenstein(4, tau, eps)?;
    let g6q = eisenstein(6, tau, eps)?;
    let omega1 = two_pi_i() * lambda;
    let omega2 = tau * omega1;
    let eta1 = -2.0 * two_pi_i() * two_pi_i() * g2q / omega1;
    let eta2 = (two_pi_i() + eta1 * omega2) / omega1;
    let m_tau = -8.0 * PI * tau.im * (g2q + 1.0 / (8.0 * PI * tau.im));
    Ok(EllipticCurveData {
        point: *p,
        omega1,
        omega2,
        eta1,
        eta2,
        g2q,
        g4q,
        g6q,
        m_tau,
        u: 20.0 * g4q / lambda.powi(4),
        v: 7.0 * g6q / (3.0 * lambda.powi(6)),
        legendre_residual: (omega1 * eta2 - eta1 * omega2 - two_pi_i()).norm(),
    })
}

/// `η₁` computed without `𝔾₂`: AGM periods of `y² = 4x³ − ux − v` are
/// located in the lattice `ω₁ℤ + ω₂ℤ`, and `η₁` is solved from the matching
/// quasi-period via Legendre's relation.
pub fn agm_quasi_period(p: &TauPoint, eps: f64) -> Result<Complex64> {
    let d = curve_data(p, eps)?;
    let mut best: Option<(f64, Complex64)> = None;
    for (w, eta) in agm::agm_periods(d.u, d.v) {
        let (x, y) = agm::lattice_coords(w, d.omega1, d.omega2)?;
        let off = (x - x.round()).abs().max((y - y.round()).abs());
        let (a, b) = (x.round(), y.round());
        if a == 0.0 && b == 0.0 {
            continue;
        }
        // η = aη₁ + bη₂ and η₂ = (2πi + η₁ω₂)/ω₁
        let eta1 = (eta - two_pi_i() * b / d.omega1) / (a + b * p.tau);
        if best.is_none_or(|(o, _)| off < o) {
            best = Some((off, eta1));
        }
    }
    match best {
        Some((off, eta1)) if off < 1e-6 => Ok(eta1),
        Some((off, _)) => Err(Error::NonConvergent { subdivisions: 64, error: off }),
        None => Err(Error::NonConvergent { subdivisions: 64, error: f64::INFINITY }),
    }
}

/// `|𝔾₂(τ) + ½ω₁η₁/(2πi)²|` with `η₁` from the AGM.
pub fn fricke_residual(p: &TauPoint, eps: f64) -> Result<f64> {
    let g2 = eisenstein(2, p.tau, eps)?;
    let eta1 = agm_quasi_period(p, eps)?;
    let omega1 = two_pi_i() * p.lambda;
    Ok((g2 + 0.5 * omega1 * eta1 / (two_pi_i() * two_pi_i())).norm())
}

/// The period matrix `[[ω₁, η₁], [ω₂, η₂]]` (rows: the cycles `1`, `τ`;
/// columns: `dx/y`, `x dx/y`).
pub fn period_matrix_elliptic(d: &EllipticCurveData) -> PeriodMatrix {
    PeriodMatrix {
        entries: vec![vec![d.omega1, d.eta1], vec![d.omega2, d.eta2]],
        abs_errors: vec![vec![0.0; 2]; 2],
        row_labels: vec!["γ₁ (1)".into(), "γ₂ (τ)".into()],
        col_labels: vec!["dx/y".into(), "x dx/y".into()],
        twist: 0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipticSv {
    pub data: EllipticCurveData,
    /// Closed form; the checks are those of `P̄⁻¹P`.
    pub matrix: SvMatrix,
    /// Largest entry of `closed form − P̄⁻¹P`.
    pub periods_residual: f64,
    #[serde(with = "complex_serde")]
    pub trace: Complex64,
    #[serde(with = "complex_serde")]
    pub determinant: Complex64,
}

/// `diag(λ̄⁻¹, λ̄) · [[𝔪̄, (𝔪𝔪̄ − 1)/(4π Im τ)], [−4π Im τ, −𝔪]] · diag(λ, λ⁻¹)`.
pub fn sv_closed_form(tau: Complex64, lambda: Complex64, m: Complex64) -> [[Complex64; 2]; 2] {
    let y = tau.im;
    let lb = lambda.conj();
    let inner = [[m.conj(), (m * m.conj() - 1.0) / (4.0 * PI * y)], [Complex64::new(-4.0 * PI * y, 0.0), -m]];
    let left = [lb.inv(), lb];
    let right = [lambda, lambda.inv()];
    let mut s = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            s[i][j] = left[i] * inner[i][j] * right[j];
        }
    }
    s
}

pub fn sv_matrix_elliptic(p: &TauPoint, eps: f64) -> Result<EllipticSv> {
    let data = curve_data(p, eps)?;
    let s = sv_closed_form(p.tau, p.lambda, data.m_tau);
    let pm = period_matrix_elliptic(&data);
    let numeric = sv_matrix(&pm, &pm.conj())?;
    let mut periods_residual: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            periods_residual = periods_residual.max((s[i][j] - numeric.entries[i][j]).norm());
        }
    }
    Ok(EllipticSv {
        data,
        matrix: SvMatrix { entries: s.iter().map(|r| r.to_vec()).collect(), checks: numeric.checks },
        periods_residual,
        trace: s[0][0] + s[1][1],
        determinant: s[0][0] * s[1][1] - s[0][1] * s[1][0],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaPairing {
    /// `−4π|λ|² Im τ`
    pub closed_form: f64,
    /// `(2πi)⁻¹ ∫ dz ∧ dz̄` over the parallelogram `ω₁{s + tτ}` by cubature.
    #[serde(with = "complex_serde")]
    pub quadrature: Complex64,
    pub residual: f64,
}

/// `(2πi)⁻¹ ∫_E (dx/y) ∧ conj(dx/y)`.
pub fn area_pairing(p: &TauPoint) -> Result<AreaPairing> {
    let closed_form = -4.0 * PI * p.lambda.norm_sqr() * p.tau.im;
    let omega1 = two_pi_i() * p.lambda;
    // z = ω₁(s + tτ): dz ∧ dz̄ = |ω₁|²(τ̄ − τ) ds ∧ dt
    let jac = omega1.norm_sqr() * (p.tau.conj() - p.tau);
    let cub = adaptive_2d(|_, _| jac, vec![(0.0, 1.0, 0.0, 1.0)], 1e-13, 0.0, 16)?;
    let quadrature = cub.value / two_pi_i();
    Ok(AreaPairing { closed_form, quadrature, residual: (quadrature - closed_form).norm() })
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-15;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn g2_limits_and_coefficients() {
        assert!((eisenstein(2, c(0.0, 8.0), EPS).unwrap() - (-1.0 / 24.0)).norm() < 1e-20);
        assert!((eisenstein(2, c(0.0, 1.0), EPS).unwrap() - (-1.0 / (8.0 * PI))).norm() < 1e-14);
        assert_eq!(divisor_power_sum(4, 1), 7.0);
        assert_eq!(divisor_power_sum(6, 3), 1.0 + 8.0 + 27.0 + 216.0);
        // q⁴ coefficient, read off the full series at small |q|; the tail is ≈ 6q
        let tau = c(0.1, 1.0);
        let q = (two_pi_i() * tau).exp();
        let head = -1.0 / 24.0 + q + 3.0 * q * q + 4.0 * q.powi(3);
        let c4 = (eisenstein(2, tau, EPS).unwrap() - head) / q.powi(4);
        assert!((c4 - 7.0).norm() < 10.0 * q.norm(), "{c4}");
        // E₄(i) = 3Γ(1/4)⁸/(2π)⁶, E₆(i) = 0
        let g = 3.625_609_908_221_908_f64;
        let e4 = 3.0 * g.powi(8) / (2.0 * PI).powi(6);
        assert!((240.0 * eisenstein(4, c(0.0, 1.0), EPS).unwrap() - e4).norm() < 1e-12);
        assert!(eisenstein(6, c(0.0, 1.0), EPS).unwrap().norm() < 1e-15);
        assert!(matches!(eisenstein(2, c(0.0, 0.0), EPS), Err(Error::NotConvergent(_))));
        assert!(matches!(eisenstein(3, c(0.0, 1.0), EPS), Err(Error::Input(_))));
    }

    #[test]
    fn g2star_values_and_modularity() {
        assert!(g2star(c(0.0, 1.0), EPS).unwrap().norm() < 1e-15);
        for y in [10.0, 100.0, 1000.0] {
            assert!((g2star(c(0.3, y), EPS).unwrap() - (-1.0 / 24.0)).norm() <= 1.0 / (8.0 * PI * y) + 1e-15);
        }
        for tau in [c(0.0, 2.0), c(0.3, 1.1), c(-0.45, 0.9), c(0.5, 0.8), c(1.7, 1.3)] {
            assert!(g2star_modularity_residual(tau, EPS).unwrap() < 1e-10, "{tau}");
        }
    }

    #[test]
    fn curve_data_at_i() {
        let d = curve_data(&TauPoint::new(c(0.0, 1.0), c(1.0, 0.0)).unwrap(), EPS).unwrap();
        assert!((d.eta1 - c(0.0, 0.5)).norm() < 1e-14);
        assert!(d.m_tau.norm() < 1e-14);
        assert!(d.legendre_residual < 1e-12);
        // rearranged Legendre: η₂ = η₁τ + 2πi/ω₁
        assert!((d.eta2 - (d.eta1 * c(0.0, 1.0) + two_pi_i() / d.omega1)).norm() < 1e-14);
        assert!(TauPoint::new(c(0.0, 1.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn fricke_against_agm() {
        for (tau, lambda) in [(c(0.0, 1.0), c(1.0, 0.0)), (c(0.3, 1.1), c(0.7, -0.4)), (c(0.5, 0.9), c(0.0, 2.0))] {
            let p = TauPoint::new(tau, lambda).unwrap();
            assert!(fricke_residual(&p, EPS).unwrap() < 1e-10, "{tau}");
        }
    }

    #[test]
    fn sv_matrix_at_i() {
        let sv = sv_matrix_elliptic(&TauPoint::new(c(0.0, 1.0), c(1.0, 0.0)).unwrap(), EPS).unwrap();
        let expect = [[c(0.0, 0.0), c(-1.0 / (4.0 * PI), 0.0)], [c(-4.0 * PI, 0.0), c(0.0, 0.0)]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((sv.matrix.entries[i][j] - expect[i][j]).norm() < 1e-13);
            }
        }
        assert!(sv.periods_residual < 1e-12);
        assert!(sv.matrix.checks.involution.unwrap() < 1e-12);
        assert!(sv.trace.norm() < 1e-13);
        assert!((sv.determinant + 1.0).norm() < 1e-13);
    }

    #[test]
    fn sv_matrix_structure() {
        // generic (τ, λ): S = P̄⁻¹P, S·S̄ = I and det S = −1 always; S² = I and
        // tr S = 0 need S real, i.e. Re τ ∈ ½ℤ and λ ∈ ℝ ∪ iℝ
        for (tau, lambda) in [(c(0.3, 1.1), c(0.7, -0.4)), (c(-0.2, 0.7), c(0.1, 1.0))] {
            let sv = sv_matrix_elliptic(&TauPoint::new(tau, lambda).unwrap(), EPS).unwrap();
            assert!(sv.periods_residual < 1e-10);
            assert!(sv.matrix.checks.s_sbar < 1e-10);
            assert!((sv.determinant + 1.0).norm() < 1e-12);
        }
        for (tau, lambda) in [(c(0.0, 1.3), c(2.0, 0.0)), (c(0.5, 0.9), c(0.0, 0.5)), (c(0.5, 2.0), c(-1.5, 0.0))] {
            let sv = sv_matrix_elliptic(&TauPoint::new(tau, lambda).unwrap(), EPS).unwrap();
            assert!(sv.periods_residual < 1e-10);
            assert!(sv.matrix.checks.involution.unwrap() < 1e-9);
            assert!(sv.trace.norm() < 1e-12);
        }
    }

    #[test]
    fn lambda_equivariance() {
        let tau = c(0.25, 0.8);
        let lambda = c(1.3, 0.6);
        let s1 = sv_matrix_elliptic(&TauPoint::new(tau, c(1.0, 0.0)).unwrap(), EPS).unwrap().matrix.entries;
        let sl = sv_matrix_elliptic(&TauPoint::new(tau, lambda).unwrap(), EPS).unwrap().matrix.entries;
        let left = [lambda.conj().inv(), lambda.conj()];
        let right = [lambda, lambda.inv()];
        for i in 0..2 {
            for j in 0..2 {
                assert!((sl[i][j] - left[i] * s1[i][j] * right[j]).norm() < 1e-12 * sl[i][j].norm().max(1.0));
            }
        }
    }

    #[test]
    fn area_pairing_values() {
        let a = area_pairing(&TauPoint::new(c(0.0, 1.0), c(1.0, 0.0)).unwrap()).unwrap();
        assert!((a.closed_form + 4.0 * PI).abs() < 1e-14 && a.residual < 1e-10);
        let a = area_pairing(&TauPoint::new(c(0.0, 1.0), c(2.0, 0.0)).unwrap()).unwrap();
        assert!((a.closed_form + 16.0 * PI).abs() < 1e-13 && a.residual < 1e-10);
        let a = area_pairing(&TauPoint::new(c(0.4, 0.7), c(0.3, -1.1)).unwrap()).unwrap();
        assert!(a.residual < 1e-10 * a.closed_form.abs());
    }
}
