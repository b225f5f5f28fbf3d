//! Logarithmic differential forms.
//!
//! [`LogForm1`] is a rational 1-form `Σ cᵢ dz/(z − aᵢ) + κ dz` on the
//! projective line. Poles are finite; the residue at infinity is implicit
//! (minus the sum of finite residues). The constant `κ` exists only so that
//! exact forms like `dz/(a−1)` can be integrated along paths; such forms
//! have a double pole at infinity and are rejected by the sphere routines.
//!
//! [`LogFormN`] is a sum of product terms on `ℂⁿ`, see [`multi`].

pub mod multi;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::ProjPoint;
use crate::json::complex_serde;

pub use multi::{c0_dual_hypercube, check_c0_recipe, leray_residue, RecipeCheck, mzv_nu, mzv_omega, LinFactor, LogFormN, NTerm};

/// `residue · dz/(z − pole)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleTerm {
    #[serde(with = "complex_serde")]
    pub residue: Complex64,
    #[serde(with = "complex_serde")]
    pub pole: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLogForm1", into = "RawLogForm1")]
pub struct LogForm1 {
    terms: Vec<PoleTerm>,
    constant: Complex64,
}

impl LogForm1 {
    /// Builds `Σ cᵢ dz/(z − pᵢ)`. Infinite poles are accepted only if their
    /// residue is consistent with the finite ones; they are then dropped.
    pub fn new(terms: impl IntoIterator<Item = (Complex64, ProjPoint)>) -> Result<Self> {
        let mut finite = Vec::new();
        let mut at_inf = None;
        for (c, p) in terms {
            if !c.is_finite() {
                return Err(Error::Input(format!("non-finite residue {c}")));
            }
            match p {
                ProjPoint::Infinity => {
                    if at_inf.replace(c).is_some() {
                        return Err(Error::DuplicatePoint("inf".into()));
                    }
                }
                ProjPoint::Finite(a) => {
                    if !a.is_finite() {
                        return Err(Error::Input("non-finite pole".into()));
                    }
                    if finite.iter().any(|t: &PoleTerm| ProjPoint::Finite(t.pole).approx_eq(&p)) {
                        return Err(Error::DuplicatePoint(p.to_string()));
                    }
                    finite.push(PoleTerm { residue: c, pole: a });
                }
            }
        }
        let form = LogForm1 { terms: finite, constant: Complex64::new(0.0, 0.0) };
        if let Some(c) = at_inf {
            let implied = form.residue_at_infinity();
            if (c - implied).norm() > 1e-12 * (1.0 + c.norm()) {
                return Err(Error::Input(format!("residue {c} at infinity contradicts the implied value {implied}")));
            }
        }
        Ok(form)
    }

    pub fn zero() -> Self {
        LogForm1 { terms: Vec::new(), constant: Complex64::new(0.0, 0.0) }
    }

    /// `dz/(z − a)`.
    pub fn dz_over(a: Complex64) -> Self {
        LogForm1 { terms: vec![PoleTerm { residue: Complex64::new(1.0, 0.0), pole: a }], constant: Complex64::new(0.0, 0.0) }
    }

    /// The holomorphic form `κ dz`.
    pub fn constant(kappa: Complex64) -> Self {
        LogForm1 { terms: Vec::new(), constant: kappa }
    }

    /// `dlog((z − top)/(z − bottom))`; an infinite argument contributes the
    /// factor 1.
    pub fn dlog_ratio(top: ProjPoint, bottom: ProjPoint) -> Result<Self> {
        if top.approx_eq(&bottom) {
            return Err(Error::EqualEndpoints);
        }
        let mut terms = Vec::new();
        if let ProjPoint::Finite(b) = top {
            terms.push((Complex64::new(1.0, 0.0), ProjPoint::Finite(b)));
        }
        if let ProjPoint::Finite(b) = bottom {
            terms.push((Complex64::new(-1.0, 0.0), ProjPoint::Finite(b)));
        }
        LogForm1::new(terms)
    }

    pub fn terms(&self) -> &[PoleTerm] {
        &self.terms
    }

    pub fn constant_term(&self) -> Complex64 {
        self.constant
    }

    /// True when every pole is simple, including the one at infinity.
    pub fn is_logarithmic(&self) -> bool {
        self.constant == Complex64::new(0.0, 0.0)
    }

    pub fn residue_at_infinity(&self) -> Complex64 {
        -self.terms.iter().map(|t| t.residue).sum::<Complex64>()
    }

    /// Classical residue (no factor of 2πi).
    pub fn residue_coeff(&self, p: &ProjPoint) -> Complex64 {
        match p {
            ProjPoint::Infinity => self.residue_at_infinity(),
            ProjPoint::Finite(_) => self
                .terms
                .iter()
                .find(|t| ProjPoint::Finite(t.pole).approx_eq(p))
                .map(|t| t.residue)
                .unwrap_or_default(),
        }
    }

    /// Finite poles with nonzero residue.
    pub fn finite_poles(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.terms.iter().filter(|t| t.residue != Complex64::new(0.0, 0.0)).map(|t| t.pole)
    }

    /// All poles with nonzero residue, infinity included when it is one.
    pub fn poles(&self) -> Vec<ProjPoint> {
        let mut v: Vec<ProjPoint> = self.finite_poles().map(ProjPoint::Finite).collect();
        if self.has_pole_at_infinity() {
            v.push(ProjPoint::Infinity);
        }
        v
    }

    pub fn has_pole_at_infinity(&self) -> bool {
        !self.is_logarithmic() || self.residue_at_infinity().norm() > 1e-14 * self.residue_scale()
    }

    fn residue_scale(&self) -> f64 {
        self.terms.iter().map(|t| t.residue.norm()).fold(1.0, f64::max)
    }

    /// Coefficient of `dz` at `z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = self.constant;
        for t in &self.terms {
            acc += t.residue / (z - t.pole);
        }
        acc
    }

    /// Like [`eval`](Self::eval) but refuses points on a pole.
    pub fn eval_checked(&self, z: Complex64) -> Result<Complex64> {
        if self.finite_poles().any(|p| p == z) {
            return Err(Error::OnSingularLocus);
        }
        Ok(self.eval(z))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        LogForm1 {
            terms: self.terms.iter().map(|t| PoleTerm { residue: t.residue * c, pole: t.pole }).collect(),
            constant: self.constant * c,
        }
    }

    /// Sum of two forms, merging coincident poles.
    pub fn add(&self, other: &LogForm1) -> Self {
        let mut terms = self.terms.clone();
        for t in &other.terms {
            match terms.iter_mut().find(|s| ProjPoint::Finite(s.pole).approx_eq(&ProjPoint::Finite(t.pole))) {
                Some(s) => s.residue += t.residue,
                None => terms.push(*t),
            }
        }
        LogForm1 { terms, constant: self.constant + other.constant }
    }

    /// Pull-back under complex conjugation of the coordinate: poles and
    /// residues are conjugated.
    pub fn conj_poles(&self) -> Self {
        LogForm1 {
            terms: self.terms.iter().map(|t| PoleTerm { residue: t.residue.conj(), pole: t.pole.conj() }).collect(),
            constant: self.constant.conj(),
        }
    }
}

/// `2πi · c₀∨` of a path from `b1` to `b2`: residue −1 at `b1`, +1 at `b2`.
pub fn c0_dual_path(b1: ProjPoint, b2: ProjPoint) -> Result<LogForm1> {
    LogForm1::dlog_ratio(b2, b1)
}

pub fn residue_coeff(f: &LogForm1, p: &ProjPoint) -> Complex64 {
    f.residue_coeff(p)
}

#[derive(Serialize, Deserialize)]
struct RawLogForm1 {
    terms: Vec<RawPoleTerm>,
    #[serde(default, with = "complex_serde", skip_serializing_if = "is_zero")]
    constant: Complex64,
}

#[derive(Serialize, Deserialize)]
struct RawPoleTerm {
    #[serde(with = "complex_serde")]
    residue: Complex64,
    pole: ProjPoint,
}

fn is_zero(z: &Complex64) -> bool {
    *z == Complex64::new(0.0, 0.0)
}

impl std::fmt::Display for LogForm1 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let fmt_c = |z: Complex64| if z.im == 0.0 { format!("{}", z.re) } else { format!("({z})") };
        let mut parts: Vec<String> = self.terms().iter().map(|t| format!("{}·dz/(z − {})", fmt_c(t.residue), t.pole)).collect();
        if self.constant_term() != Complex64::new(0.0, 0.0) {
            parts.push(format!("{}·dz", fmt_c(self.constant_term())));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl TryFrom<RawLogForm1> for LogForm1 {
    type Error = Error;
    fn try_from(raw: RawLogForm1) -> Result<Self> {
        let mut f = LogForm1::new(raw.terms.into_iter().map(|t| (t.residue, t.pole)))?;
        f.constant = raw.constant;
        Ok(f)
    }
}

impl From<LogForm1> for RawLogForm1 {
    fn from(f: LogForm1) -> Self {
        RawLogForm1 {
            terms: f.terms.iter().map(|t| RawPoleTerm { residue: t.residue, pole: ProjPoint::Finite(t.pole) }).collect(),
            constant: f.constant,
        }
    }
}
