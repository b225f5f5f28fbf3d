//! Archimedean height pairing of degree-zero divisors on `ℙ¹`.
//!
//! `⟨D, E⟩ = −(2πi)⁻¹ ∫ ν̄_D ∧ ν_E = (2πi)⁻¹ ∫ ν_E ∧ ν̄_D`, where `ν_D` is the
//! logarithmic form with residue divisor `D`. In genus 0 there are no
//! holomorphic forms to correct by, and the value is the Green's sum
//! `Σ mᵢnⱼ log|dᵢ − eⱼ|²` with every term at `∞` dropped.

use std::f64::consts::PI;

use num::{BigRational, Signed, ToPrimitive, Zero};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::LogForm1;
use crate::geom::ProjPoint;
use crate::json::{complex_serde, format_rational, rational_serde};
use crate::quad::{integrate_sphere, Estimate, Method, QuadConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RawTerm(#[serde(with = "rational_serde")] BigRational, ProjPoint);

/// `Σ mᵢ (pᵢ)` with `Σ mᵢ = 0` and distinct points; zero coefficients are
/// dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<RawTerm>", into = "Vec<RawTerm>")]
pub struct DivisorDeg0 {
    terms: Vec<(BigRational, ProjPoint)>,
}

impl DivisorDeg0 {
    pub fn new(terms: impl IntoIterator<Item = (BigRational, ProjPoint)>) -> Result<Self> {
        let mut out: Vec<(BigRational, ProjPoint)> = Vec::new();
        let mut degree = BigRational::zero();
        for (m, p) in terms {
            if out.iter().any(|(_, q)| q.approx_eq(&p)) {
                return Err(Error::DuplicatePoint(p.to_string()));
            }
            degree += &m;
            if !m.is_zero() {
                out.push((m, p));
            }
        }
        if !degree.is_zero() {
            return Err(Error::NonZeroDegree(format_rational(&degree)));
        }
        Ok(DivisorDeg0 { terms: out })
    }

    /// Convenience constructor from integer coefficients.
    pub fn from_ints(terms: &[(i64, ProjPoint)]) -> Result<Self> {
        Self::new(terms.iter().map(|&(m, p)| (BigRational::from_integer(m.into()), p)))
    }

    pub fn terms(&self) -> &[(BigRational, ProjPoint)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, p: &ProjPoint) -> BigRational {
        self.terms.iter().find(|(_, q)| q.approx_eq(p)).map(|(m, _)| m.clone()).unwrap_or_else(BigRational::zero)
    }

    pub fn scaled(&self, c: &BigRational) -> Self {
        DivisorDeg0 {
            terms: if c.is_zero() { Vec::new() } else { self.terms.iter().map(|(m, p)| (m * c, *p)).collect() },
        }
    }

    fn finite(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.terms.iter().filter_map(|(m, p)| p.as_finite().map(|z| (to_f64(m), z)))
    }
}

impl TryFrom<Vec<RawTerm>> for DivisorDeg0 {
    type Error = Error;
    fn try_from(raw: Vec<RawTerm>) -> Result<Self> {
        DivisorDeg0::new(raw.into_iter().map(|RawTerm(m, p)| (m, p)))
    }
}

impl From<DivisorDeg0> for Vec<RawTerm> {
    fn from(d: DivisorDeg0) -> Self {
        d.terms.into_iter().map(|(m, p)| RawTerm(m, p)).collect()
    }
}

impl std::fmt::Display for DivisorDeg0 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, p)) in self.terms.iter().enumerate() {
            let sign = match (k, m.is_negative()) {
                (0, false) => "",
                (0, true) => "−",
                (_, false) => " + ",
                (_, true) => " − ",
            };
            let mag = format_rational(&m.abs());
            write!(f, "{sign}{}({p})", if mag == "1" { "" } else { &mag })?;
        }
        Ok(())
    }
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `ν_D = Σ mᵢ dz/(z − dᵢ)`; the residue at `∞` is carried implicitly.
pub fn nu_divisor(d: &DivisorDeg0) -> Result<LogForm1> {
    LogForm1::new(d.finite().map(|(m, z)| (Complex64::new(m, 0.0), ProjPoint::Finite(z))))
}

fn check_disjoint(d: &DivisorDeg0, e: &DivisorDeg0) -> Result<()> {
    for (_, p) in d.terms() {
        if e.terms().iter().any(|(_, q)| q.approx_eq(p)) {
            return Err(Error::OverlappingSupports(p.to_string()));
        }
    }
    Ok(())
}

/// `Σᵢⱼ mᵢnⱼ log|dᵢ − eⱼ|²` over finite points.
pub fn green_closed_form(d: &DivisorDeg0, e: &DivisorDeg0) -> Result<f64> {
    check_disjoint(d, e)?;
    Ok(d.finite().map(|(m, x)| e.finite().map(|(n, y)| m * n * (x - y).norm_sqr().ln()).sum::<f64>()).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightPairing {
    /// Real part, with the quadrature error bound.
    pub estimate: Estimate,
    /// Should vanish up to `abs_error`.
    pub imaginary_part: f64,
}

/// `⟨D, E⟩` by quadrature over the sphere.
pub fn height_pairing(d: &DivisorDeg0, e: &DivisorDeg0, cfg: &QuadConfig) -> Result<HeightPairing> {
    check_disjoint(d, e)?;
    if d.is_zero() || e.is_zero() {
        let estimate =
            Estimate { value: Complex64::new(0.0, 0.0), abs_error: 0.0, samples_or_evals: 0, method: Method::Sphere2d };
        return Ok(HeightPairing { estimate, imaginary_part: 0.0 });
    }
    let raw = integrate_sphere(&nu_divisor(e)?, &nu_divisor(d)?, cfg)?;
    let z = raw.scaled(Complex64::new(0.0, 2.0 * PI).inv());
    Ok(HeightPairing { estimate: Estimate { value: Complex64::new(z.value.re, 0.0), ..z }, imaginary_part: z.value.im })
}

/// `c · Π (z − zᵢ)^{kᵢ} / Π (z − pⱼ)^{lⱼ}` with finite, distinct zeros and
/// poles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalFunction {
    pub zeros: Vec<(ProjPoint, u32)>,
    pub poles: Vec<(ProjPoint, u32)>,
    #[serde(with = "complex_serde")]
    pub leading: Complex64,
}

impl RationalFunction {
    fn finite(list: &[(ProjPoint, u32)]) -> Result<Vec<(Complex64, u32)>> {
        list.iter()
            .map(|(p, k)| p.as_finite().map(|z| (z, *k)).ok_or_else(|| Error::Input("zeros and poles must be finite".into())))
            .collect()
    }

    pub fn divisor(&self) -> Result<DivisorDeg0> {
        if self.leading.norm() == 0.0 || !self.leading.is_finite() {
            return Err(Error::Input("leading coefficient must be finite and nonzero".into()));
        }
        let zeros = Self::finite(&self.zeros)?;
        let poles = Self::finite(&self.poles)?;
        let mut terms: Vec<(BigRational, ProjPoint)> = Vec::new();
        let mut at_inf: i64 = 0;
        for (z, k) in &zeros {
            terms.push((BigRational::from_integer((*k as i64).into()), ProjPoint::Finite(*z)));
            at_inf -= *k as i64;
        }
        for (z, l) in &poles {
            terms.push((BigRational::from_integer((-(*l as i64)).into()), ProjPoint::Finite(*z)));
            at_inf += *l as i64;
        }
        terms.push((BigRational::from_integer(at_inf.into()), ProjPoint::Infinity));
        DivisorDeg0::new(terms)
    }

    /// `log|f(p)|²`; `None` at a zero or pole.
    pub fn log_abs_sq(&self, p: &ProjPoint) -> Result<Option<f64>> {
        let zeros = Self::finite(&self.zeros)?;
        let poles = Self::finite(&self.poles)?;
        let base = self.leading.norm_sqr().ln();
        match p {
            ProjPoint::Infinity => {
                let nz: u32 = zeros.iter().map(|z| z.1).sum();
                let np: u32 = poles.iter().map(|z| z.1).sum();
                Ok((nz == np).then_some(base))
            }
            ProjPoint::Finite(x) => {
                let mut s = base;
                for (z, k) in &zeros {
                    let d = (x - z).norm_sqr();
                    if d == 0.0 {
                        return Ok(None);
                    }
                    s += *k as f64 * d.ln();
                }
                for (z, l) in &poles {
                    let d = (x - z).norm_sqr();
                    if d == 0.0 {
                        return Ok(None);
                    }
                    s -= *l as f64 * d.ln();
                }
                Ok(Some(s))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrincipalCheck {
    pub pairing: HeightPairing,
    /// `Σ nⱼ log|f(xⱼ)|²`
    pub predicted: f64,
    pub residual: f64,
}

/// `|⟨D, div f⟩ − Σ nⱼ log|f(xⱼ)|²|` for `D = Σ nⱼ (xⱼ)`.
pub fn principal_check(d: &DivisorDeg0, f: &RationalFunction, cfg: &QuadConfig) -> Result<PrincipalCheck> {
    let div = f.divisor()?;
    check_disjoint(d, &div)?;
    let mut predicted = 0.0;
    for (n, x) in d.terms() {
        let v = f.log_abs_sq(x)?.ok_or_else(|| Error::OverlappingSupports(x.to_string()))?;
        predicted += to_f64(n) * v;
    }
    let pairing = height_pairing(d, &div, cfg)?;
    let residual = (pairing.estimate.value.re - predicted).abs();
    Ok(PrincipalCheck { pairing, predicted, residual })
}

/// Minimum distance between any two points drawn by [`random_divisor_pair`].
pub const RANDOM_SEPARATION: f64 = 0.25;

fn random_point<R: Rng>(rng: &mut R, taken: &[ProjPoint]) -> ProjPoint {
    loop {
        let p = if rng.gen_bool(0.15) {
            ProjPoint::Infinity
        } else {
            // uniform in the disc |z| ≤ 4
            let r = 4.0 * rng.gen::<f64>().sqrt();
            ProjPoint::Finite(Complex64::from_polar(r, rng.gen_range(0.0..2.0 * PI)))
        };
        let clear = taken.iter().all(|q| match (p, q) {
            (ProjPoint::Finite(a), ProjPoint::Finite(b)) => (a - b).norm() >= RANDOM_SEPARATION,
            (a, b) => a != *b,
        });
        if clear {
            return p;
        }
    }
}

fn random_divisor<R: Rng>(rng: &mut R, taken: &mut Vec<ProjPoint>) -> DivisorDeg0 {
    let k = rng.gen_range(2..=4usize);
    let mut coefs: Vec<i64> = (0..k - 1).map(|_| if rng.gen_bool(0.5) { 1 } else { 2 } * if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
    let s: i64 = coefs.iter().sum();
    if s == 0 {
        coefs.pop();
        let s: i64 = coefs.iter().sum();
        coefs.push(-s);
    } else {
        coefs.push(-s);
    }
    let mut terms = Vec::new();
    for c in coefs {
        let p = random_point(rng, taken);
        taken.push(p);
        terms.push((c, p));
    }
    DivisorDeg0::from_ints(&terms).expect("distinct points, degree zero")
}

/// Two nonzero degree-zero divisors with disjoint supports: 2–4 points each,
/// drawn from `|z| ≤ 4` or `∞`, pairwise at least [`RANDOM_SEPARATION`]
/// apart; coefficients are small integers.
pub fn random_divisor_pair<R: Rng>(rng: &mut R) -> (DivisorDeg0, DivisorDeg0) {
    let mut taken = Vec::new();
    let d = random_divisor(rng, &mut taken);
    let e = random_divisor(rng, &mut taken);
    (d, e)
}
