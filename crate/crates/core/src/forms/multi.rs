//! Product-type logarithmic n-forms on `ℂⁿ`.
//!
//! A [`LogFormN`] is `(2πi)^twist · Σ_k s_k · dt₀∧…∧dt_{n−1} / Π_{f∈F_k} f`
//! where each `f` is an affine factor `tᵢ − a` or `tᵢ − tⱼ`. Coordinates are
//! 0-based. Factors are kept canonical (`i < j` for coordinate differences,
//! the sign absorbed into the scalar) so forms compare syntactically.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::LogForm1;
use crate::error::{Error, Result};
use crate::json::complex_serde;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinFactor {
    /// `tᵢ − a`
    CoordMinusConst {
        i: usize,
        #[serde(with = "complex_serde")]
        a: Complex64,
    },
    /// `tᵢ − tⱼ`
    CoordMinusCoord { i: usize, j: usize },
}

impl LinFactor {
    pub fn coord_minus_const(i: usize, a: impl Into<Complex64>) -> Self {
        LinFactor::CoordMinusConst { i, a: a.into() }
    }

    pub fn coord_minus_coord(i: usize, j: usize) -> Self {
        LinFactor::CoordMinusCoord { i, j }
    }

    /// Canonical representative and the sign relating it to `self`.
    pub fn canonical(self) -> (f64, LinFactor) {
        match self {
            LinFactor::CoordMinusCoord { i, j } if i > j => (-1.0, LinFactor::CoordMinusCoord { i: j, j: i }),
            f => (1.0, f),
        }
    }

    pub fn eval(&self, t: &[Complex64]) -> Complex64 {
        match *self {
            LinFactor::CoordMinusConst { i, a } => t[i] - a,
            LinFactor::CoordMinusCoord { i, j } => t[i] - t[j],
        }
    }

    fn max_index(&self) -> usize {
        match *self {
            LinFactor::CoordMinusConst { i, .. } => i,
            LinFactor::CoordMinusCoord { i, j } => i.max(j),
        }
    }

    fn key_cmp(&self, other: &LinFactor) -> Ordering {
        use LinFactor::*;
        match (self, other) {
            (CoordMinusConst { i, a }, CoordMinusConst { i: k, a: b }) => {
                i.cmp(k).then(a.re.total_cmp(&b.re)).then(a.im.total_cmp(&b.im))
            }
            (CoordMinusConst { .. }, CoordMinusCoord { .. }) => Ordering::Less,
            (CoordMinusCoord { .. }, CoordMinusConst { .. }) => Ordering::Greater,
            (CoordMinusCoord { i, j }, CoordMinusCoord { i: k, j: l }) => i.cmp(k).then(j.cmp(l)),
        }
    }
}

impl fmt::Display for LinFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinFactor::CoordMinusConst { i, a } => write!(f, "(t{i} - {a})"),
            LinFactor::CoordMinusCoord { i, j } => write!(f, "(t{i} - t{j})"),
        }
    }
}

/// `scalar / Π factors`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NTerm {
    #[serde(with = "complex_serde")]
    pub scalar: Complex64,
    pub factors: Vec<LinFactor>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLogFormN")]
pub struct LogFormN {
    n: usize,
    terms: Vec<NTerm>,
    twist: i32,
}

#[derive(Deserialize)]
struct RawLogFormN {
    n: usize,
    terms: Vec<NTerm>,
    #[serde(default)]
    twist: i32,
}

impl TryFrom<RawLogFormN> for LogFormN {
    type Error = Error;
    fn try_from(r: RawLogFormN) -> Result<Self> {
        LogFormN::new(r.n, r.terms, r.twist)
    }
}

fn normalize_term(n: usize, mut term: NTerm) -> Result<NTerm> {
    let mut factors = Vec::with_capacity(term.factors.len());
    for f in term.factors {
        if let LinFactor::CoordMinusCoord { i, j } = f {
            if i == j {
                return Err(Error::Input(format!("factor {f} is identically zero")));
            }
        }
        if f.max_index() >= n {
            return Err(Error::DimensionMismatch(format!("factor {f} in a form of dimension {n}")));
        }
        let (s, g) = f.canonical();
        term.scalar *= s;
        factors.push(g);
    }
    factors.sort_by(|a, b| a.key_cmp(b));
    if factors.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::NotNormalCrossing);
    }
    Ok(NTerm { scalar: term.scalar, factors })
}

impl LogFormN {
    pub fn new(n: usize, terms: Vec<NTerm>, twist: i32) -> Result<Self> {
        let terms = terms.into_iter().map(|t| normalize_term(n, t)).collect::<Result<Vec<_>>>()?;
        Ok(LogFormN { n, terms, twist })
    }

    /// A single product term.
    pub fn monomial(n: usize, scalar: Complex64, factors: Vec<LinFactor>) -> Result<Self> {
        LogFormN::new(n, vec![NTerm { scalar, factors }], 0)
    }

    /// A one-variable form as a 1-dimensional product form.
    pub fn from_form1(f: &LogForm1) -> Self {
        let mut terms: Vec<NTerm> = f
            .terms()
            .iter()
            .map(|t| NTerm { scalar: t.residue, factors: vec![LinFactor::coord_minus_const(0, t.pole)] })
            .collect();
        if f.constant_term() != Complex64::new(0.0, 0.0) {
            terms.push(NTerm { scalar: f.constant_term(), factors: vec![] });
        }
        LogFormN { n: 1, terms, twist: 0 }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[NTerm] {
        &self.terms
    }

    pub fn twist(&self) -> i32 {
        self.twist
    }

    pub fn with_twist(mut self, twist: i32) -> Self {
        self.twist = twist;
        self
    }

    pub fn scale(&self, c: Complex64) -> Self {
        LogFormN {
            n: self.n,
            terms: self.terms.iter().map(|t| NTerm { scalar: t.scalar * c, factors: t.factors.clone() }).collect(),
            twist: self.twist,
        }
    }

    /// `(2πi)^twist` as a number.
    pub fn twist_factor(&self) -> Complex64 {
        Complex64::new(0.0, 2.0 * PI).powi(self.twist)
    }

    /// Coefficient of `dt₀∧…∧dt_{n−1}` at `t`.
    pub fn eval(&self, t: &[Complex64]) -> Result<Complex64> {
        if t.len() != self.n {
            return Err(Error::DimensionMismatch(format!("point of length {} for a form of dimension {}", t.len(), self.n)));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            let mut den = Complex64::new(1.0, 0.0);
            for f in &term.factors {
                let v = f.eval(t);
                if v == Complex64::new(0.0, 0.0) {
                    return Err(Error::OnSingularLocus);
                }
                den *= v;
            }
            acc += term.scalar / den;
        }
        Ok(acc * self.twist_factor())
    }

    /// Unchecked evaluation without the twist factor (hot loop of the
    /// Monte Carlo sampler).
    pub(crate) fn eval_raw(&self, t: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            let mut den = Complex64::new(1.0, 0.0);
            for f in &term.factors {
                den *= f.eval(t);
            }
            acc += term.scalar / den;
        }
        acc
    }

    /// For a 0-form, its value.
    pub fn scalar_value(&self) -> Result<Complex64> {
        if self.n != 0 {
            return Err(Error::DimensionMismatch(format!("form has dimension {}", self.n)));
        }
        self.eval(&[])
    }

    /// `self ∧ other`, with `other`'s coordinates placed after `self`'s.
    pub fn wedge(&self, other: &LogFormN) -> LogFormN {
        let shift = |f: &LinFactor| match *f {
            LinFactor::CoordMinusConst { i, a } => LinFactor::CoordMinusConst { i: i + self.n, a },
            LinFactor::CoordMinusCoord { i, j } => LinFactor::CoordMinusCoord { i: i + self.n, j: j + self.n },
        };
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut factors = a.factors.clone();
                factors.extend(b.factors.iter().map(shift));
                terms.push(NTerm { scalar: a.scalar * b.scalar, factors });
            }
        }
        LogFormN { n: self.n + other.n, terms, twist: self.twist + other.twist }
    }

    /// Merges terms with identical denominators and drops zero terms.
    pub fn simplified(&self) -> LogFormN {
        let mut out: Vec<NTerm> = Vec::new();
        for t in &self.terms {
            match out.iter_mut().find(|s| s.factors == t.factors) {
                Some(s) => s.scalar += t.scalar,
                None => out.push(t.clone()),
            }
        }
        out.retain(|t| t.scalar != Complex64::new(0.0, 0.0));
        LogFormN { n: self.n, terms: out, twist: self.twist }
    }

    /// Constant points `a` appearing in factors `tᵢ − a`, per coordinate.
    pub fn constant_loci(&self) -> Vec<Vec<Complex64>> {
        let mut out = vec![Vec::new(); self.n];
        for t in &self.terms {
            for f in &t.factors {
                if let LinFactor::CoordMinusConst { i, a } = *f {
                    if !out[i].contains(&a) {
                        out[i].push(a);
                    }
                }
            }
        }
        out
    }

    /// Pairs `(i, j)` with `i < j` coupled by a factor `tᵢ − tⱼ`.
    pub fn couplings(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for t in &self.terms {
            for f in &t.factors {
                if let LinFactor::CoordMinusCoord { i, j } = *f {
                    if !out.contains(&(i, j)) {
                        out.push((i, j));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for LogFormN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twist != 0 {
            write!(f, "(2πi)^{} · ", self.twist)?;
        }
        write!(f, "[")?;
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", t.scalar)?;
            if !t.factors.is_empty() {
                write!(f, "/")?;
                for g in &t.factors {
                    write!(f, "{g}")?;
                }
            }
        }
        write!(f, "]")?;
        if self.n > 0 {
            write!(f, " dt0..dt{}", self.n - 1)?;
        }
        Ok(())
    }
}

/// Poincaré–Leray residue along the hyperplane `factor = 0`.
///
/// The eliminated coordinate is `i` (the smaller index for `tᵢ − tⱼ`, which
/// is replaced by `tⱼ`). The result carries one more power of 2πi and the
/// sign `(−1)^i` from moving `dtᵢ` to the front. Terms without the factor
/// drop out.
pub fn leray_residue(f: &LogFormN, factor: LinFactor) -> Result<LogFormN> {
    let (_, target) = factor.canonical();
    if let LinFactor::CoordMinusCoord { i, j } = target {
        if i == j {
            return Err(Error::Input("degenerate factor".into()));
        }
    }
    if target.max_index() >= f.n {
        return Err(Error::DimensionMismatch(format!("factor {target} in a form of dimension {}", f.n)));
    }

    enum Sub {
        Const(Complex64),
        Coord(usize),
    }
    let (i, sub) = match target {
        LinFactor::CoordMinusConst { i, a } => (i, Sub::Const(a)),
        LinFactor::CoordMinusCoord { i, j } => (i, Sub::Coord(j)),
    };
    let reindex = |k: usize| if k > i { k - 1 } else { k };
    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };

    let mut found = false;
    let mut terms = Vec::new();
    for term in &f.terms {
        if !term.factors.contains(&target) {
            continue;
        }
        found = true;
        let mut scalar = term.scalar * sign;
        let mut factors = Vec::with_capacity(term.factors.len() - 1);
        for g in term.factors.iter().filter(|g| **g != target) {
            // substitute tᵢ, then renumber the surviving coordinates
            let new = match (*g, &sub) {
                (LinFactor::CoordMinusConst { i: k, a }, Sub::Const(c)) if k == i => {
                    let v = c - a;
                    if v == Complex64::new(0.0, 0.0) {
                        return Err(Error::NotNormalCrossing);
                    }
                    scalar /= v;
                    None
                }
                (LinFactor::CoordMinusConst { i: k, a }, Sub::Coord(j)) if k == i => {
                    Some(LinFactor::CoordMinusConst { i: reindex(*j), a })
                }
                (LinFactor::CoordMinusConst { i: k, a }, _) => Some(LinFactor::CoordMinusConst { i: reindex(k), a }),
                (LinFactor::CoordMinusCoord { i: k, j: l }, _) if k == i || l == i => {
                    let other = if k == i { l } else { k };
                    // (tᵢ − t_other) or (t_other − tᵢ)
                    let s = if k == i { 1.0 } else { -1.0 };
                    match &sub {
                        Sub::Const(c) => {
                            // s·(c − t_other) = −s·(t_other − c)
                            scalar *= -s;
                            Some(LinFactor::CoordMinusConst { i: reindex(other), a: *c })
                        }
                        Sub::Coord(j) => {
                            if *j == other {
                                return Err(Error::NotNormalCrossing);
                            }
                            scalar *= s;
                            Some(LinFactor::CoordMinusCoord { i: reindex(*j), j: reindex(other) })
                        }
                    }
                }
                (LinFactor::CoordMinusCoord { i: k, j: l }, _) => {
                    Some(LinFactor::CoordMinusCoord { i: reindex(k), j: reindex(l) })
                }
            };
            if let Some(h) = new {
                let (s, h) = h.canonical();
                scalar *= s;
                factors.push(h);
            }
        }
        factors.sort_by(|a, b| a.key_cmp(b));
        if factors.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::NotNormalCrossing);
        }
        terms.push(NTerm { scalar, factors });
    }
    if !found {
        return Err(Error::FactorAbsent(target.to_string()));
    }
    Ok(LogFormN { n: f.n - 1, terms, twist: f.twist + 1 }.simplified())
}

/// `(−1)^{n(n+1)/2} (2πi)^{−n} dz₁∧…∧dz_n / Π zᵢ(1 − zᵢ)`.
pub fn c0_dual_hypercube(n: usize) -> Result<LogFormN> {
    if n == 0 {
        return Err(Error::Input("dimension must be positive".into()));
    }
    let tri = n * (n + 1) / 2;
    // each 1 − zᵢ is stored as −(zᵢ − 1)
    let sign = if (tri + n).is_multiple_of(2) { 1.0 } else { -1.0 };
    let factors = (0..n)
        .flat_map(|i| [LinFactor::coord_minus_const(i, 0.0), LinFactor::coord_minus_const(i, 1.0)])
        .collect();
    Ok(LogFormN::monomial(n, Complex64::new(sign, 0.0), factors)?.with_twist(-(n as i32)))
}

fn check_indices(indices: &[u32]) -> Result<()> {
    if indices.is_empty() || indices.contains(&0) {
        return Err(Error::Input(format!("indices must be a nonempty list of positive integers, got {indices:?}")));
    }
    if *indices.last().unwrap() < 2 {
        return Err(Error::DivergentIndex(indices.to_vec()));
    }
    Ok(())
}

/// `(−1)^r Λ dtᵢ/(tᵢ − eᵢ)` with `e = (1, 0^{n₁−1}, …, 1, 0^{n_r−1})`.
pub fn mzv_omega(indices: &[u32]) -> Result<LogFormN> {
    check_indices(indices)?;
    let mut factors = Vec::new();
    for &m in indices {
        for k in 0..m {
            let e = if k == 0 { 1.0 } else { 0.0 };
            factors.push(LinFactor::coord_minus_const(factors.len(), e));
        }
    }
    let n = factors.len();
    let sign = if indices.len().is_multiple_of(2) { 1.0 } else { -1.0 };
    LogFormN::monomial(n, Complex64::new(sign, 0.0), factors)
}

/// `dt₁∧…∧dt_n / (t₁(t₂−t₁)⋯(t_n−t_{n−1})(1−t_n))`, without prefactor.
pub fn mzv_nu(n: usize) -> Result<LogFormN> {
    if n == 0 {
        return Err(Error::Input("dimension must be positive".into()));
    }
    let mut factors = vec![LinFactor::coord_minus_const(0, 0.0)];
    for k in 1..n {
        factors.push(LinFactor::coord_minus_coord(k, k - 1));
    }
    // 1 − t_n = −(t_n − 1)
    factors.push(LinFactor::coord_minus_const(n - 1, 1.0));
    LogFormN::monomial(n, Complex64::new(-1.0, 0.0), factors)
}

/// Outcome of [`check_c0_recipe`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecipeCheck {
    pub n: usize,
    /// Ordered face sequences tried: `n!·2ⁿ`.
    pub cases: usize,
    /// Face sequences `(coordinate, at_one)` whose residue disagrees.
    pub mismatches: Vec<Vec<(usize, bool)>>,
}

/// Takes iterated Leray residues of [`c0_dual_hypercube`] along every
/// ordered sequence of faces `tₖ ∈ {0, 1}` and compares each with
/// `(−1)^{n(n−1)/2}` times the cube's boundary coefficient, exactly.
pub fn check_c0_recipe(n: usize) -> Result<RecipeCheck> {
    let f = c0_dual_hypercube(n)?;
    let sign = if (n * (n - 1) / 2).is_multiple_of(2) { 1 } else { -1 };
    let mut orders = vec![vec![]];
    for _ in 0..n {
        orders = orders
            .iter()
            .flat_map(|p: &Vec<usize>| {
                (0..n).filter(|k| !p.contains(k)).map(|k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    let mut out = RecipeCheck { n, cases: 0, mismatches: Vec::new() };
    for order in orders {
        for mask in 0..(1u32 << n) {
            let faces: Vec<(usize, bool)> = order.iter().map(|&k| (k, mask >> k & 1 == 1)).collect();
            let mut g = f.clone();
            let mut remaining: Vec<usize> = (0..n).collect();
            for &(k, one) in &faces {
                let pos = remaining.iter().position(|&r| r == k).expect("coordinate still present");
                remaining.remove(pos);
                g = leray_residue(&g, LinFactor::coord_minus_const(pos, if one { 1.0 } else { 0.0 }))?;
            }
            let bd = sign * crate::geom::hypercube_face_coefficient(n, &faces)?;
            out.cases += 1;
            if g.twist() != 0 || g.scalar_value()? != Complex64::new(bd as f64, 0.0) {
                out.mismatches.push(faces);
            }
        }
    }
    Ok(out)
}
