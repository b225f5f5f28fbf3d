//! Single-valued period matrices and pairings built from the quadrature
//! engines: `S = P̄⁻¹P`, `(2πi)⁻¹∫ν∧ω̄`, the double copy identity, the
//! single-valued logarithm, Fubini on `ℂ²` and single-valued MZVs.

mod mzv;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num::{BigRational, ToPrimitive};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{c0_dual_path, LogForm1, LogFormN};
use crate::geom::{dual_pairing_matrix, intersection_number, Chain, Configuration, Path, ProjPoint, RationalMatrix};
use crate::json::{complex_matrix_serde, complex_serde, rational_serde};
use crate::quad::{integrate_mc, integrate_path, integrate_path_conj, integrate_sphere, Estimate, McConfig, Method, QuadConfig};

pub use mzv::{mzv_nested_sum, mzv_series, sv_mzv, SvMzv, MZV_ORIENTATION_SIGN};

fn two_pi_i() -> Complex64 {
    Complex64::new(0.0, 2.0 * PI)
}

/// `P[i][j] = ∫_{chains[i]} forms[j]`, with a symbolic `(2πi)^{−twist}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodMatrix {
    #[serde(with = "complex_matrix_serde")]
    pub entries: Vec<Vec<Complex64>>,
    pub abs_errors: Vec<Vec<f64>>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub twist: i32,
}

impl PeriodMatrix {
    pub fn from_entries(entries: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = entries.len();
        let m = entries.first().map_or(0, Vec::len);
        if entries.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch("ragged period matrix".into()));
        }
        Ok(PeriodMatrix {
            abs_errors: vec![vec![0.0; m]; n],
            row_labels: (0..n).map(|i| format!("row {i}")).collect(),
            col_labels: (0..m).map(|j| format!("col {j}")).collect(),
            entries,
            twist: 0,
        })
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries.first().map_or(0, Vec::len)
    }

    /// Entrywise complex conjugate (the period matrix of the conjugate
    /// embedding for data defined over ℝ).
    pub fn conj(&self) -> Self {
        PeriodMatrix {
            entries: self.entries.iter().map(|r| r.iter().map(|z| z.conj()).collect()).collect(),
            ..self.clone()
        }
    }

    fn to_na(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows(), self.cols(), |i, j| self.entries[i][j])
    }

    fn max_error(&self) -> f64 {
        self.abs_errors.iter().flatten().fold(0.0, |a: f64, &b| a.max(b))
    }
}

fn check_supported(config: &Configuration, forms: &[LogForm1], chains: &[Chain]) -> Result<()> {
    for f in forms {
        for p in f.poles() {
            if !config.a.iter().any(|q| q.approx_eq(&p)) {
                return Err(Error::Input(format!("form {f} has a pole at {p}, which is not in A")));
            }
        }
    }
    for c in chains {
        for (p, _) in crate::geom::boundary(c).terms() {
            if !config.b.iter().any(|q| q.approx_eq(p)) {
                return Err(Error::InvalidChain(format!("chain {c} has boundary at {p}, which is not in B")));
            }
        }
    }
    Ok(())
}

/// Period matrix of `forms` (poles in `A`) over `chains` (boundary in `B`).
pub fn period_matrix(config: &Configuration, forms: &[LogForm1], chains: &[Chain], cfg: &QuadConfig) -> Result<PeriodMatrix> {
    check_supported(config, forms, chains)?;
    let mut entries = Vec::with_capacity(chains.len());
    let mut abs_errors = Vec::with_capacity(chains.len());
    for c in chains {
        let (mut row, mut err) = (Vec::new(), Vec::new());
        for f in forms {
            let e = integrate_path(f, c, cfg)?;
            row.push(e.value);
            err.push(e.abs_error);
        }
        entries.push(row);
        abs_errors.push(err);
    }
    Ok(PeriodMatrix {
        entries,
        abs_errors,
        row_labels: chains.iter().map(|c| c.to_string()).collect(),
        col_labels: forms.iter().map(|f| f.to_string()).collect(),
        twist: 0,
    })
}

/// Residuals of the defining relations of a single-valued matrix. Norms are
/// the largest entry modulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvChecks {
    /// `‖S·S̄ − I‖`
    pub s_sbar: f64,
    /// `‖S² − I‖`, when `P̄` is the entrywise conjugate of `P`.
    pub involution: Option<f64>,
    /// `|tr S − round(tr S)|`, same condition.
    pub trace_integrality: Option<f64>,
    /// 1-norm condition estimate of `P̄`.
    pub condition: f64,
    /// Largest quadrature error among the entries of `P` and `P̄`.
    pub input_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvMatrix {
    #[serde(with = "complex_matrix_serde")]
    pub entries: Vec<Vec<Complex64>>,
    pub checks: SvChecks,
}

impl SvMatrix {
    pub fn trace(&self) -> Complex64 {
        (0..self.entries.len()).map(|i| self.entries[i][i]).sum()
    }
}

const SINGULAR_CONDITION: f64 = 1e14;

fn max_entry(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

fn one_norm(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

fn from_na(m: &DMatrix<Complex64>) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

/// `S = P̄⁻¹ P`.
pub fn sv_matrix(p: &PeriodMatrix, pbar: &PeriodMatrix) -> Result<SvMatrix> {
    let n = p.rows();
    if p.cols() != n || pbar.rows() != n || pbar.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "need square matrices of equal size, got {}×{} and {}×{}",
            p.rows(),
            p.cols(),
            pbar.rows(),
            pbar.cols()
        )));
    }
    if p.row_labels != pbar.row_labels || p.col_labels != pbar.col_labels {
        return Err(Error::Input("P and P̄ carry different basis labels".into()));
    }
    let (a, b) = (p.to_na(), pbar.to_na());
    let id = DMatrix::<Complex64>::identity(n, n);
    let inv = b.clone().try_inverse();
    let condition = match &inv {
        Some(inv) => one_norm(&b) * one_norm(inv),
        None => f64::INFINITY,
    };
    let inv = match inv {
        Some(inv) if condition.is_finite() && condition < SINGULAR_CONDITION => inv,
        _ => return Err(Error::SingularPeriodMatrix(condition)),
    };
    let s = &inv * &a;
    let sbar = s.map(|z| z.conj());
    let s_sbar = if n == 0 { 0.0 } else { max_entry(&(&s * &sbar - &id)) };
    let scale = p.entries.iter().flatten().fold(1.0, |m: f64, z| m.max(z.norm()));
    let self_conjugate = p
        .entries
        .iter()
        .flatten()
        .zip(pbar.entries.iter().flatten())
        .all(|(x, y)| (x.conj() - y).norm() <= 1e-12 * scale + p.max_error() + pbar.max_error());
    let (involution, trace_integrality) = if self_conjugate {
        let tr: Complex64 = s.trace();
        let tr_err = (tr.re - tr.re.round()).abs().max(tr.im.abs());
        (Some(if n == 0 { 0.0 } else { max_entry(&(&s * &s - &id)) }), Some(tr_err))
    } else {
        (None, None)
    };
    Ok(SvMatrix {
        entries: from_na(&s),
        checks: SvChecks { s_sbar, involution, trace_integrality, condition, input_error: p.max_error().max(pbar.max_error()) },
    })
}

/// Right multiplication by `τ(−1) = diag((−1)^{wⱼ})`: the mixed Tate
/// normalisation, under which `𝕃` maps to `+1`, on a basis of weights `wⱼ`.
pub fn apply_parity(s: &SvMatrix, weights: &[i32]) -> Result<SvMatrix> {
    let n = s.entries.len();
    if weights.len() != n {
        return Err(Error::DimensionMismatch(format!("{} weights for a {n}×{n} matrix", weights.len())));
    }
    let entries = s
        .entries
        .iter()
        .map(|row| row.iter().zip(weights).map(|(z, w)| if w.rem_euclid(2) == 1 { -z } else { *z }).collect())
        .collect();
    Ok(SvMatrix { entries, checks: s.checks.clone() })
}

/// `(2πi)⁻¹ ∫_{ℙ¹(ℂ)} ν ∧ ω̄`.
pub fn sv_pairing(nu: &LogForm1, omega: &LogForm1, cfg: &QuadConfig) -> Result<Estimate> {
    Ok(integrate_sphere(nu, omega, cfg)?.scaled(two_pi_i().inv()))
}

/// Single-valued logarithm with its direct cross-check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvLog {
    #[serde(with = "complex_serde")]
    pub a: Complex64,
    /// `(2πi)⁻¹ ∫ dlog((z−a)/(z−1)) ∧ dz̄/z̄`
    pub estimate: Estimate,
    /// `2 ln|a|` evaluated directly.
    pub direct: f64,
    pub residual: f64,
}

fn check_modulus(a: Complex64, name: &str) -> Result<()> {
    if !a.is_finite() || a.norm() < 1e-12 || (a - 1.0).norm() < 1e-12 {
        return Err(Error::DegenerateModulus(format!("{name} = {a}")));
    }
    Ok(())
}

pub fn sv_log(a: Complex64, cfg: &QuadConfig) -> Result<SvLog> {
    check_modulus(a, "a")?;
    let nu = c0_dual_path(ProjPoint::Finite(Complex64::new(1.0, 0.0)), ProjPoint::Finite(a))?;
    let omega = LogForm1::dz_over(Complex64::new(0.0, 0.0));
    let estimate = sv_pairing(&nu, &omega, cfg)?;
    let direct = 2.0 * a.norm().ln();
    Ok(SvLog { a, estimate, direct, residual: (estimate.value - direct).norm() })
}

/// Cycles and forms for the logarithm: `A = {0, ∞}`, `B = {1, a}`.
#[derive(Debug, Clone)]
pub struct LogFamily {
    pub a: Complex64,
    pub config: Configuration,
    /// `dz/(a−1)` and `dz/z`
    pub forms: Vec<LogForm1>,
    /// A path from 1 to `a` avoiding 0, and a positive loop at 0.
    pub chains: Vec<Chain>,
    /// `dlog((z−a)/(z−1))` and `dz/z`
    pub nu: LogForm1,
    pub omega: LogForm1,
    /// Cycles for `ν` (in `X∖B` relative to `A`): a ray from 0 to ∞ and a
    /// positive loop at 1.
    pub gammas: Vec<Chain>,
    /// Cycles for `ω` (in `X∖A` relative to `B`): a positive loop at 0 and
    /// the path from 1 to `a`.
    pub deltas: Vec<Chain>,
}

fn dist_to_segment(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let s = (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
    (p - (a + d * s)).norm()
}

fn dist_to_ray(p: Complex64, o: Complex64, dir: Complex64) -> f64 {
    let s = ((p - o) * dir.conj()).re.max(0.0);
    (p - (o + dir * s)).norm()
}

fn seg_ray_dist(a: Complex64, b: Complex64, dir: Complex64) -> f64 {
    // the ray starts at 0; sample the segment finely, which is enough for
    // choosing a well-separated direction
    (0..=64)
        .map(|k| {
            let p = a + (b - a) * (k as f64 / 64.0);
            dist_to_ray(p, Complex64::new(0.0, 0.0), dir)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Builds the standard cycles for `log a` with every contact well
/// separated, so that all intersections are transverse.
pub fn log_family(a: Complex64) -> Result<LogFamily> {
    check_modulus(a, "a")?;
    let (zero, one) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    // path 1 → a, detouring through ±i·max(1, |a|) if it passes near 0
    let mut vertices = vec![one, a];
    if dist_to_segment(zero, one, a) < 0.3 {
        let h = a.norm().max(1.0);
        let cands = [Complex64::new(0.0, h), Complex64::new(0.0, -h)];
        let best = cands
            .iter()
            .copied()
            .max_by(|x, y| {
                let dx = dist_to_segment(zero, one, *x).min(dist_to_segment(zero, *x, a));
                let dy = dist_to_segment(zero, one, *y).min(dist_to_segment(zero, *y, a));
                dx.total_cmp(&dy)
            })
            .expect("two candidates");
        vertices = vec![one, best, a];
    }
    let path_dist0 = vertices.windows(2).map(|w| dist_to_segment(zero, w[0], w[1])).fold(f64::INFINITY, f64::min);
    let r = 0.25f64.min((a - 1.0).norm() / 3.0).min(a.norm() / 3.0).min(path_dist0 / 2.0);

    // ray direction: farthest from the path, 1 and a among 32 directions
    let dir = (0..32)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * (k as f64 + 0.5) / 32.0))
        .max_by(|x, y| {
            let score = |d: Complex64| {
                vertices.windows(2).map(|w| seg_ray_dist(w[0], w[1], d)).fold(f64::INFINITY, f64::min)
            };
            score(*x).total_cmp(&score(*y))
        })
        .expect("nonempty");
    let first_leg = vertices[1] - vertices[0];
    let loop1 = Path::circle_from(one, r, (-first_leg).arg());
    let loop0 = Path::circle_from(zero, r, (dir * Complex64::new(0.0, 1.0)).arg());
    let path = Chain::from(Path::polyline(&vertices)?);

    let nu = c0_dual_path(ProjPoint::Finite(one), ProjPoint::Finite(a))?;
    let omega = LogForm1::dz_over(zero);
    let config = crate::geom::validate_configuration(
        vec![ProjPoint::Finite(zero), ProjPoint::Infinity],
        vec![ProjPoint::Finite(one), ProjPoint::Finite(a)],
    )?;
    Ok(LogFamily {
        a,
        config,
        forms: vec![LogForm1::constant((a - 1.0).inv()), omega.clone()],
        chains: vec![path.clone(), Chain::from(loop0.clone())],
        nu,
        omega,
        gammas: vec![Chain::from(Path::ray(zero, dir)), Chain::from(loop1)],
        deltas: vec![Chain::from(loop0), path],
    })
}

/// One term `C_ij · ∫_{γᵢ} ν · ∫_{δ̄ⱼ} ω` of the double copy sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubleCopyTerm {
    pub i: usize,
    pub j: usize,
    #[serde(with = "rational_serde")]
    pub coefficient: BigRational,
    pub period1: Estimate,
    pub period2: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubleCopyReport {
    pub lhs: Estimate,
    #[serde(with = "complex_serde")]
    pub rhs: Complex64,
    /// First-order propagated error of the right-hand side.
    pub rhs_error: f64,
    pub rhs_terms: Vec<DoubleCopyTerm>,
    pub intersection_matrix: RationalMatrix,
    pub residual: f64,
}

impl DoubleCopyReport {
    pub fn combined_error(&self) -> f64 {
        self.lhs.abs_error + self.rhs_error
    }
}

/// Both sides of `∫ ν∧ω̄ = Σ C_ij ∫_{γᵢ}ν ∫_{δ̄ⱼ}ω` with `C = (Mᵀ)⁻¹`,
/// `M_ij = γᵢ·δⱼ`.
pub fn double_copy_check(
    nu: &LogForm1,
    omega: &LogForm1,
    gammas: &[Chain],
    deltas: &[Chain],
    cfg: &QuadConfig,
) -> Result<DoubleCopyReport> {
    let rows = gammas
        .iter()
        .map(|g| deltas.iter().map(|d| intersection_number(g, d)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let m = RationalMatrix::from_rows(rows)?;
    let c = dual_pairing_matrix(&m)?;
    let lhs = integrate_sphere(nu, omega, cfg)?;
    let p1 = gammas.iter().map(|g| integrate_path(nu, g, cfg)).collect::<Result<Vec<_>>>()?;
    let p2 = deltas.iter().map(|d| integrate_path_conj(omega, d, cfg)).collect::<Result<Vec<_>>>()?;
    let mut rhs = Complex64::new(0.0, 0.0);
    let mut rhs_error = 0.0;
    let mut rhs_terms = Vec::new();
    for (i, x) in p1.iter().enumerate() {
        for (j, y) in p2.iter().enumerate() {
            let coefficient = c[(i, j)].clone();
            if coefficient == BigRational::from_integer(0.into()) {
                continue;
            }
            let k = coefficient.to_f64().unwrap_or(f64::NAN);
            rhs += x.value * y.value * k;
            rhs_error += k.abs() * (x.value.norm() * y.abs_error + y.value.norm() * x.abs_error + x.abs_error * y.abs_error);
            rhs_terms.push(DoubleCopyTerm { i, j, coefficient, period1: *x, period2: *y });
        }
    }
    Ok(DoubleCopyReport { lhs, rhs, rhs_error, rhs_terms, intersection_matrix: m, residual: (lhs.value - rhs).norm() })
}

/// Fubini on `ℂ²` for two logarithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FubiniReport {
    /// `(2πi)⁻² ∫_{ℂ²} (−ν₁∧ν₂) ∧ conj(ω₁∧ω₂)` by Monte Carlo.
    pub product_integral: Estimate,
    pub log_a: SvLog,
    pub log_b: SvLog,
    pub product: f64,
    pub combined_error: f64,
    pub residual: f64,
}

/// Compares the 4-real-dimensional single-valued period of the product
/// cycle, `ν_{γ₁×γ₂} = (−1)^{n₁n₂} ν₁∧ν₂`, against `sv_log(a)·sv_log(b)`.
pub fn fubini_check(a: Complex64, b: Complex64, cfg: &QuadConfig, mcfg: &McConfig) -> Result<FubiniReport> {
    check_modulus(a, "a")?;
    check_modulus(b, "b")?;
    let one = ProjPoint::Finite(Complex64::new(1.0, 0.0));
    let nu1 = LogFormN::from_form1(&c0_dual_path(one, ProjPoint::Finite(a))?);
    let nu2 = LogFormN::from_form1(&c0_dual_path(one, ProjPoint::Finite(b))?);
    let om = LogFormN::from_form1(&LogForm1::dz_over(Complex64::new(0.0, 0.0)));
    let nu = nu1.wedge(&nu2).scale(Complex64::new(-1.0, 0.0));
    let omega = om.wedge(&om);
    let raw = integrate_mc(&nu, &omega, mcfg)?;
    let product_integral = Estimate { method: Method::MonteCarlo, ..raw.scaled(two_pi_i().powi(-2)) };
    let log_a = sv_log(a, cfg)?;
    let log_b = sv_log(b, cfg)?;
    let product = log_a.estimate.value.re * log_b.estimate.value.re;
    let combined_error = product_integral.abs_error
        + log_a.estimate.value.norm() * log_b.estimate.abs_error
        + log_b.estimate.value.norm() * log_a.estimate.abs_error;
    let residual = (product_integral.value - product).norm();
    Ok(FubiniReport { product_integral, log_a, log_b, product, combined_error, residual })
}
