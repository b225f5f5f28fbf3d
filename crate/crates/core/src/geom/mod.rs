//! Marked points on the Riemann sphere, piecewise paths and formal chains.
//!
//! Paths are built from straight segments, circular arcs and a terminal
//! ray that ends at infinity. A [`Chain`] is a formal rational combination
//! of paths; its [`Chain::boundary`] and the signed crossing count of
//! [`intersection_number`] are exact over the rationals.

mod intersect;
mod rational;

use std::f64::consts::PI;
use std::fmt;

use num::{BigRational, One, Zero};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::{complex_serde, rational_serde};

pub use intersect::{intersection_number, piece_crossings, Crossing};
pub use rational::{dual_pairing_matrix, hypercube_face_coefficient, RationalMatrix};

/// Points closer than this are treated as the same point.
pub const POINT_EPS: f64 = 1e-12;

/// A point of the projective line: a finite complex coordinate or infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProjPoint {
    Finite(Complex64),
    Infinity,
}

impl ProjPoint {
    pub fn finite(re: f64, im: f64) -> Self {
        ProjPoint::Finite(Complex64::new(re, im))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ProjPoint::Infinity)
    }

    pub fn as_finite(&self) -> Option<Complex64> {
        match self {
            ProjPoint::Finite(z) => Some(*z),
            ProjPoint::Infinity => None,
        }
    }

    /// Equality up to [`POINT_EPS`] (relative for large coordinates).
    pub fn approx_eq(&self, other: &ProjPoint) -> bool {
        match (self, other) {
            (ProjPoint::Infinity, ProjPoint::Infinity) => true,
            (ProjPoint::Finite(a), ProjPoint::Finite(b)) => {
                (a - b).norm() <= POINT_EPS * (1.0 + a.norm().max(b.norm()))
            }
            _ => false,
        }
    }

    pub fn conj(&self) -> ProjPoint {
        match self {
            ProjPoint::Finite(z) => ProjPoint::Finite(z.conj()),
            ProjPoint::Infinity => ProjPoint::Infinity,
        }
    }
}

impl From<Complex64> for ProjPoint {
    fn from(z: Complex64) -> Self {
        ProjPoint::Finite(z)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Infinity => write!(f, "inf"),
            ProjPoint::Finite(z) if z.im == 0.0 => write!(f, "{}", z.re),
            ProjPoint::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

impl Serialize for ProjPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ProjPoint::Infinity => s.serialize_str("inf"),
            ProjPoint::Finite(z) => complex_serde::serialize(z, s),
        }
    }
}

impl<'de> Deserialize<'de> for ProjPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Tag(String),
            Pair([f64; 2]),
            Real(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Tag(t) if t == "inf" => Ok(ProjPoint::Infinity),
            Raw::Tag(t) => Err(serde::de::Error::custom(format!("unknown point tag {t:?}"))),
            Raw::Pair([re, im]) if re.is_finite() && im.is_finite() => Ok(ProjPoint::finite(re, im)),
            Raw::Real(re) if re.is_finite() => Ok(ProjPoint::finite(re, 0.0)),
            _ => Err(serde::de::Error::custom("point coordinates must be finite")),
        }
    }
}

/// Two disjoint marked point sets on the projective line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub a: Vec<ProjPoint>,
    pub b: Vec<ProjPoint>,
}

pub fn validate_configuration(a: Vec<ProjPoint>, b: Vec<ProjPoint>) -> Result<Configuration> {
    for set in [&a, &b] {
        for (i, p) in set.iter().enumerate() {
            if set[..i].iter().any(|q| q.approx_eq(p)) {
                return Err(Error::DuplicatePoint(p.to_string()));
            }
        }
    }
    if let Some(p) = a.iter().find(|p| b.iter().any(|q| q.approx_eq(p))) {
        return Err(Error::OverlappingDivisors(p.to_string()));
    }
    Ok(Configuration { a, b })
}

/// One smooth piece of a path.
///
/// Arcs run from `theta_start` to `theta_end`; the orientation is the sign of
/// the difference, and the sweep may not exceed one full turn. A ray starts
/// at a finite point and ends at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Piece {
    Segment {
        #[serde(with = "complex_serde")]
        start: Complex64,
        #[serde(with = "complex_serde")]
        end: Complex64,
    },
    Arc {
        #[serde(with = "complex_serde")]
        center: Complex64,
        radius: f64,
        theta_start: f64,
        theta_end: f64,
    },
    Ray {
        #[serde(with = "complex_serde")]
        start: Complex64,
        #[serde(with = "complex_serde")]
        direction: Complex64,
    },
}

impl Piece {
    pub fn start(&self) -> Complex64 {
        match *self {
            Piece::Segment { start, .. } | Piece::Ray { start, .. } => start,
            Piece::Arc { center, radius, theta_start, .. } => center + Complex64::from_polar(radius, theta_start),
        }
    }

    pub fn end(&self) -> ProjPoint {
        match *self {
            Piece::Segment { end, .. } => ProjPoint::Finite(end),
            Piece::Arc { center, radius, theta_end, .. } => {
                ProjPoint::Finite(center + Complex64::from_polar(radius, theta_end))
            }
            Piece::Ray { .. } => ProjPoint::Infinity,
        }
    }

    fn check(&self) -> Result<()> {
        let ok = match *self {
            Piece::Segment { start, end } => (end - start).norm() > POINT_EPS * (1.0 + start.norm()),
            Piece::Arc { radius, theta_start, theta_end, center } => {
                radius > 0.0
                    && radius.is_finite()
                    && center.is_finite()
                    && theta_start.is_finite()
                    && theta_end.is_finite()
                    && theta_start != theta_end
                    && (theta_end - theta_start).abs() <= 2.0 * PI + 1e-12
            }
            Piece::Ray { start, direction } => start.is_finite() && direction.norm() > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidChain(format!("degenerate piece {self:?}")))
        }
    }

    /// Image under complex conjugation, with the parametrisation conjugated.
    pub fn conj(&self) -> Piece {
        match *self {
            Piece::Segment { start, end } => Piece::Segment { start: start.conj(), end: end.conj() },
            Piece::Arc { center, radius, theta_start, theta_end } => Piece::Arc {
                center: center.conj(),
                radius,
                theta_start: -theta_start,
                theta_end: -theta_end,
            },
            Piece::Ray { start, direction } => Piece::Ray { start: start.conj(), direction: direction.conj() },
        }
    }

    pub fn reversed(&self) -> Result<Piece> {
        match *self {
            Piece::Segment { start, end } => Ok(Piece::Segment { start: end, end: start }),
            Piece::Arc { center, radius, theta_start, theta_end } => Ok(Piece::Arc {
                center,
                radius,
                theta_start: theta_end,
                theta_end: theta_start,
            }),
            Piece::Ray { .. } => Err(Error::InvalidChain("a ray cannot be reversed".into())),
        }
    }

    /// Smallest distance from `p` to the piece.
    pub fn distance_to(&self, p: Complex64) -> f64 {
        match *self {
            Piece::Segment { start, end } => {
                let d = end - start;
                let t = ((p - start) * d.conj()).re / d.norm_sqr();
                (start + d * t.clamp(0.0, 1.0) - p).norm()
            }
            Piece::Ray { start, direction } => {
                let t = ((p - start) * direction.conj()).re / direction.norm_sqr();
                (start + direction * t.max(0.0) - p).norm()
            }
            Piece::Arc { center, radius, theta_start, theta_end } => {
                let rel = p - center;
                if rel.norm() > 0.0 && angle_in_sweep(rel.arg(), theta_start, theta_end).is_some() {
                    (rel.norm() - radius).abs()
                } else {
                    let a = center + Complex64::from_polar(radius, theta_start);
                    let b = center + Complex64::from_polar(radius, theta_end);
                    (a - p).norm().min((b - p).norm())
                }
            }
        }
    }
}

/// Position in `[0, 1]` of angle `theta` along the sweep from `start` to `end`.
pub(crate) fn angle_in_sweep(theta: f64, start: f64, end: f64) -> Option<f64> {
    let sweep = end - start;
    let mut delta = (theta - start).rem_euclid(2.0 * PI);
    if sweep < 0.0 && delta > 0.0 {
        delta -= 2.0 * PI;
    }
    let s = delta / sweep;
    if (0.0..=1.0).contains(&s) {
        Some(s)
    } else {
        None
    }
}

/// A connected sequence of pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Piece>", into = "Vec<Piece>")]
pub struct Path {
    pieces: Vec<Piece>,
}

impl TryFrom<Vec<Piece>> for Path {
    type Error = Error;
    fn try_from(pieces: Vec<Piece>) -> Result<Self> {
        Path::new(pieces)
    }
}

impl From<Path> for Vec<Piece> {
    fn from(p: Path) -> Self {
        p.pieces
    }
}

impl Path {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidChain("empty path".into()));
        }
        for p in &pieces {
            p.check()?;
        }
        for (i, w) in pieces.windows(2).enumerate() {
            match w[0].end() {
                ProjPoint::Infinity => {
                    return Err(Error::InvalidChain(format!("piece {i} reaches infinity before the end of the path")))
                }
                ProjPoint::Finite(e) => {
                    let s = w[1].start();
                    if (e - s).norm() > 1e-9 * (1.0 + e.norm()) {
                        return Err(Error::InvalidChain(format!("piece {} does not start where piece {i} ends", i + 1)));
                    }
                }
            }
        }
        Ok(Path { pieces })
    }

    pub fn segment(start: Complex64, end: Complex64) -> Self {
        Path { pieces: vec![Piece::Segment { start, end }] }
    }

    /// Positively oriented full circle starting at angle 0.
    pub fn circle(center: Complex64, radius: f64) -> Self {
        Path::circle_from(center, radius, 0.0)
    }

    /// Counter-clockwise circle based at angle `theta0`.
    pub fn circle_from(center: Complex64, radius: f64, theta0: f64) -> Self {
        Path { pieces: vec![Piece::Arc { center, radius, theta_start: theta0, theta_end: theta0 + 2.0 * PI }] }
    }

    pub fn ray(start: Complex64, direction: Complex64) -> Self {
        Path { pieces: vec![Piece::Ray { start, direction }] }
    }

    pub fn polyline(points: &[Complex64]) -> Result<Self> {
        let pieces = points.windows(2).map(|w| Piece::Segment { start: w[0], end: w[1] }).collect();
        Path::new(pieces)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn start(&self) -> ProjPoint {
        ProjPoint::Finite(self.pieces[0].start())
    }

    pub fn end(&self) -> ProjPoint {
        self.pieces[self.pieces.len() - 1].end()
    }

    pub fn is_loop(&self) -> bool {
        self.start().approx_eq(&self.end()) || {
            match (self.start(), self.end()) {
                (ProjPoint::Finite(a), ProjPoint::Finite(b)) => (a - b).norm() <= 1e-9 * (1.0 + a.norm()),
                _ => false,
            }
        }
    }

    pub fn reaches_infinity(&self) -> bool {
        self.end().is_infinity()
    }

    pub fn conj(&self) -> Path {
        Path { pieces: self.pieces.iter().map(Piece::conj).collect() }
    }

    pub fn reversed(&self) -> Result<Path> {
        let pieces = self.pieces.iter().rev().map(Piece::reversed).collect::<Result<Vec<_>>>()?;
        Ok(Path { pieces })
    }

    pub fn distance_to(&self, p: Complex64) -> f64 {
        self.pieces.iter().map(|q| q.distance_to(p)).fold(f64::INFINITY, f64::min)
    }
}

/// A single weighted path inside a [`Chain`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainTerm {
    #[serde(with = "rational_serde")]
    pub coeff: BigRational,
    pub path: Path,
}

/// Formal rational combination of paths.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Chain {
    pub terms: Vec<ChainTerm>,
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Piece::Segment { start, end } => write!(f, "[{start} → {end}]"),
            Piece::Arc { center, radius, theta_start, theta_end } => {
                write!(f, "arc(c = {center}, r = {radius}, {theta_start:.4} → {theta_end:.4})")
            }
            Piece::Ray { start, direction } => write!(f, "ray({start} + s·{direction})"),
        }
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if !t.coeff.is_one() {
                write!(f, "{}·", crate::json::format_rational(&t.coeff))?;
            }
            let pieces: Vec<String> = t.path.pieces().iter().map(|p| p.to_string()).collect();
            write!(f, "{}", pieces.join(" "))?;
        }
        Ok(())
    }
}

impl From<Path> for Chain {
    fn from(path: Path) -> Self {
        Chain { terms: vec![ChainTerm { coeff: BigRational::one(), path }] }
    }
}

impl Chain {
    pub fn new() -> Self {
        Chain::default()
    }

    pub fn with_term(mut self, coeff: BigRational, path: Path) -> Self {
        self.terms.push(ChainTerm { coeff, path });
        self
    }

    pub fn scaled(&self, c: &BigRational) -> Chain {
        Chain {
            terms: self.terms.iter().map(|t| ChainTerm { coeff: &t.coeff * c, path: t.path.clone() }).collect(),
        }
    }

    pub fn plus(&self, other: &Chain) -> Chain {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Chain { terms }
    }

    pub fn conj(&self) -> Chain {
        Chain {
            terms: self.terms.iter().map(|t| ChainTerm { coeff: t.coeff.clone(), path: t.path.conj() }).collect(),
        }
    }

    pub fn reversed(&self) -> Result<Chain> {
        let terms = self
            .terms
            .iter()
            .map(|t| Ok(ChainTerm { coeff: t.coeff.clone(), path: t.path.reversed()? }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Chain { terms })
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.terms.iter().map(|t| &t.path)
    }

    /// Formal boundary `Σ coeff · ((end) − (start))`, merged and with zero
    /// coefficients dropped.
    pub fn boundary(&self) -> FormalPoints {
        let mut out = FormalPoints::default();
        for t in &self.terms {
            if t.path.is_loop() {
                continue;
            }
            out.add(t.path.end(), t.coeff.clone());
            out.add(t.path.start(), -t.coeff.clone());
        }
        out
    }
}

pub fn boundary(c: &Chain) -> FormalPoints {
    c.boundary()
}

/// Formal rational combination of points of the projective line.
#[derive(Debug, Clone, Default, Serialize)]
pub struct FormalPoints {
    terms: Vec<(ProjPoint, BigRational)>,
}

impl PartialEq for FormalPoints {
    fn eq(&self, other: &Self) -> bool {
        self.terms.len() == other.terms.len() && self.terms.iter().all(|(p, c)| other.coefficient(p) == *c)
    }
}

impl FormalPoints {
    pub fn add(&mut self, p: ProjPoint, c: BigRational) {
        if let Some(i) = self.terms.iter().position(|(q, _)| q.approx_eq(&p)) {
            self.terms[i].1 += c;
            if self.terms[i].1.is_zero() {
                self.terms.remove(i);
            }
        } else if !c.is_zero() {
            self.terms.push((p, c));
        }
    }

    pub fn coefficient(&self, p: &ProjPoint) -> BigRational {
        self.terms.iter().find(|(q, _)| q.approx_eq(p)).map(|(_, c)| c.clone()).unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(ProjPoint, BigRational)] {
        &self.terms
    }

    pub fn negated(&self) -> FormalPoints {
        FormalPoints { terms: self.terms.iter().map(|(p, c)| (*p, -c.clone())).collect() }
    }
}
