//! Signed transverse crossings between chains.
//!
//! A crossing counts +1 when (tangent of the first chain, tangent of the
//! second) is a positively oriented frame of ℝ². Tangencies, overlaps and
//! contacts involving a piece endpoint are refused rather than perturbed.

use num::{BigInt, BigRational, Zero};
use num_complex::Complex64;

use super::{angle_in_sweep, Chain, Piece};
use crate::error::{Error, Result};

/// Separation below which two features are considered touching.
pub const GENERIC_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub point: Complex64,
    pub sign: i32,
}

fn cross(u: Complex64, v: Complex64) -> f64 {
    u.re * v.im - u.im * v.re
}

fn eps_at(z: Complex64) -> f64 {
    GENERIC_EPS * (1.0 + z.norm())
}

/// Straight piece `p + t·d`, `t ∈ [0, t_max]`.
struct Line {
    p: Complex64,
    d: Complex64,
    t_max: f64,
}

struct Circ {
    c: Complex64,
    r: f64,
    th0: f64,
    th1: f64,
}

enum Geo {
    Line(Line),
    Circ(Circ),
}

fn geo(piece: &Piece) -> Geo {
    match *piece {
        Piece::Segment { start, end } => Geo::Line(Line { p: start, d: end - start, t_max: 1.0 }),
        Piece::Ray { start, direction } => Geo::Line(Line { p: start, d: direction, t_max: f64::INFINITY }),
        Piece::Arc { center, radius, theta_start, theta_end } => {
            Geo::Circ(Circ { c: center, r: radius, th0: theta_start, th1: theta_end })
        }
    }
}

impl Circ {
    fn tangent(&self, theta: f64) -> Complex64 {
        let s = if self.th1 > self.th0 { 1.0 } else { -1.0 };
        Complex64::new(0.0, s) * Complex64::from_polar(1.0, theta)
    }

    fn contains_angle(&self, theta: f64) -> bool {
        angle_in_sweep(theta, self.th0, self.th1).is_some()
    }

    fn point(&self, theta: f64) -> Complex64 {
        self.c + Complex64::from_polar(self.r, theta)
    }
}

/// Candidate point with tangents of the first and second piece.
type Hit = (Complex64, Complex64, Complex64);

fn line_line(a: &Line, b: &Line) -> Result<Vec<Hit>> {
    let den = cross(a.d, b.d);
    let scale = a.d.norm() * b.d.norm();
    let qp = b.p - a.p;
    if den.abs() <= 1e-12 * scale {
        // parallel: overlap is the only problem
        if cross(qp, a.d).abs() <= eps_at(a.p) * a.d.norm() {
            let proj = |z: Complex64| ((z - a.p) * a.d.conj()).re / a.d.norm_sqr();
            let u0 = proj(b.p);
            let u1 = if b.t_max.is_finite() { proj(b.p + b.d * b.t_max) } else { u0 + b.t_max * proj(b.p + b.d).signum() };
            let (lo, hi) = if u0 <= u1 { (u0, u1) } else { (u1, u0) };
            let (lo, hi) = (lo.max(0.0), hi.min(a.t_max));
            if hi - lo > GENERIC_EPS {
                return Err(Error::NonGenericIntersection("collinear pieces overlap".into()));
            }
        }
        return Ok(vec![]);
    }
    let t = cross(qp, b.d) / den;
    let u = cross(qp, a.d) / den;
    if t > 0.0 && t < a.t_max && u > 0.0 && u < b.t_max {
        if den.abs() < GENERIC_EPS * scale {
            return Err(Error::NonGenericIntersection("nearly tangent straight pieces".into()));
        }
        Ok(vec![(a.p + a.d * t, a.d, b.d)])
    } else {
        Ok(vec![])
    }
}

fn line_circ(l: &Line, c: &Circ) -> Result<Vec<(Complex64, Complex64, Complex64)>> {
    let dn = l.d.norm();
    let h = cross(l.d, c.c - l.p).abs() / dn;
    let t_foot = ((c.c - l.p) * l.d.conj()).re / (dn * dn);
    let in_range = |t: f64| t > 0.0 && t < l.t_max;
    if (h - c.r).abs() <= GENERIC_EPS * (1.0 + c.r) {
        let z = l.p + l.d * t_foot;
        if in_range(t_foot) && c.contains_angle((z - c.c).arg()) {
            return Err(Error::NonGenericIntersection("straight piece tangent to an arc".into()));
        }
        return Ok(vec![]);
    }
    if h > c.r {
        return Ok(vec![]);
    }
    let half = (c.r * c.r - h * h).sqrt() / dn;
    let mut out = Vec::new();
    for t in [t_foot - half, t_foot + half] {
        if !in_range(t) {
            continue;
        }
        let z = l.p + l.d * t;
        let th = (z - c.c).arg();
        if c.contains_angle(th) {
            out.push((z, l.d, c.tangent(th)));
        }
    }
    Ok(out)
}

fn circ_circ(a: &Circ, b: &Circ) -> Result<Vec<(Complex64, Complex64, Complex64)>> {
    let dv = b.c - a.c;
    let d = dv.norm();
    let tol = GENERIC_EPS * (1.0 + a.r.max(b.r) + a.c.norm());
    if d <= tol {
        if (a.r - b.r).abs() <= tol {
            // same circle: any shared sub-arc is an overlap
            let samples = |c: &Circ| [c.th0, 0.5 * (c.th0 + c.th1), c.th1, 0.25 * (3.0 * c.th0 + c.th1), 0.25 * (c.th0 + 3.0 * c.th1)];
            let mid_a = samples(a)[1];
            let mid_b = samples(b)[1];
            if b.contains_angle(mid_a)
                || a.contains_angle(mid_b)
                || samples(b)[3..].iter().any(|&t| a.contains_angle(t))
                || samples(a)[3..].iter().any(|&t| b.contains_angle(t))
            {
                return Err(Error::NonGenericIntersection("arcs of the same circle overlap".into()));
            }
        }
        return Ok(vec![]);
    }
    let u = dv / d;
    let tangent_point = if (d - (a.r + b.r)).abs() <= tol {
        Some(a.c + u * a.r)
    } else if (d - (a.r - b.r).abs()).abs() <= tol {
        Some(if a.r >= b.r { a.c + u * a.r } else { a.c - u * a.r })
    } else {
        None
    };
    if let Some(z) = tangent_point {
        if a.contains_angle((z - a.c).arg()) && b.contains_angle((z - b.c).arg()) {
            return Err(Error::NonGenericIntersection("tangent arcs".into()));
        }
        return Ok(vec![]);
    }
    if d > a.r + b.r || d < (a.r - b.r).abs() {
        return Ok(vec![]);
    }
    let x = (a.r * a.r - b.r * b.r + d * d) / (2.0 * d);
    let y = (a.r * a.r - x * x).max(0.0).sqrt();
    let base = a.c + u * x;
    let perp = Complex64::new(0.0, 1.0) * u;
    let mut out = Vec::new();
    for z in [base + perp * y, base - perp * y] {
        let ta = (z - a.c).arg();
        let tb = (z - b.c).arg();
        if a.contains_angle(ta) && b.contains_angle(tb) {
            out.push((a.point(ta), a.tangent(ta), b.tangent(tb)));
        }
    }
    Ok(out)
}

fn endpoints(p: &Piece) -> Vec<Complex64> {
    let mut v = vec![p.start()];
    if let Some(e) = p.end().as_finite() {
        v.push(e);
    }
    v
}

/// Transverse crossings between two pieces.
pub fn piece_crossings(p1: &Piece, p2: &Piece) -> Result<Vec<Crossing>> {
    for (x, y) in [(p1, p2), (p2, p1)] {
        for e in endpoints(x) {
            if y.distance_to(e) <= eps_at(e) {
                return Err(Error::NonGenericIntersection(format!("endpoint {e} touches the other chain")));
            }
        }
    }
    let hits = match (geo(p1), geo(p2)) {
        (Geo::Line(a), Geo::Line(b)) => line_line(&a, &b)?,
        (Geo::Line(a), Geo::Circ(b)) => line_circ(&a, &b)?,
        (Geo::Circ(a), Geo::Line(b)) => line_circ(&b, &a)?.into_iter().map(|(z, tl, tc)| (z, tc, tl)).collect(),
        (Geo::Circ(a), Geo::Circ(b)) => circ_circ(&a, &b)?,
    };
    hits.into_iter()
        .map(|(z, t1, t2)| {
            let s = cross(t1, t2);
            if s.abs() < GENERIC_EPS * t1.norm() * t2.norm() {
                return Err(Error::NonGenericIntersection(format!("tangential contact at {z}")));
            }
            Ok(Crossing { point: z, sign: if s > 0.0 { 1 } else { -1 } })
        })
        .collect()
}

/// Signed intersection number of two chains, bilinear in the coefficients.
pub fn intersection_number(c1: &Chain, c2: &Chain) -> Result<BigRational> {
    let mut total = BigRational::zero();
    for t1 in &c1.terms {
        for t2 in &c2.terms {
            if t1.path.reaches_infinity() && t2.path.reaches_infinity() {
                return Err(Error::NonGenericIntersection("both chains end at infinity".into()));
            }
            let mut count = 0i64;
            for p1 in t1.path.pieces() {
                for p2 in t2.path.pieces() {
                    count += piece_crossings(p1, p2)?.iter().map(|c| c.sign as i64).sum::<i64>();
                }
            }
            if count != 0 {
                total += &t1.coeff * &t2.coeff * BigRational::from_integer(BigInt::from(count));
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Path;
    use num::{One, ToPrimitive};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    /// Dense polyline approximation for brute-force crossing counts.
    fn sample(path: &Path) -> Vec<Complex64> {
        let mut pts = Vec::new();
        for p in path.pieces() {
            let n = 4000;
            for k in 0..=n {
                let s = k as f64 / n as f64;
                let z = match *p {
                    Piece::Segment { start, end } => start + (end - start) * s,
                    Piece::Ray { start, direction } => start + direction * (60.0 * s),
                    Piece::Arc { center, radius, theta_start, theta_end } => {
                        center + Complex64::from_polar(radius, theta_start + s * (theta_end - theta_start))
                    }
                };
                pts.push(z);
            }
        }
        pts
    }

    fn brute(a: &Path, b: &Path) -> i64 {
        let pa = sample(a);
        let pb = sample(b);
        let mut count = 0;
        for u in pa.windows(2) {
            for v in pb.windows(2) {
                let (d1, d2) = (u[1] - u[0], v[1] - v[0]);
                let den = cross(d1, d2);
                if den == 0.0 {
                    continue;
                }
                let qp = v[0] - u[0];
                let t = cross(qp, d2) / den;
                let s = cross(qp, d1) / den;
                if (0.0..1.0).contains(&t) && (0.0..1.0).contains(&s) {
                    count += if den > 0.0 { 1 } else { -1 };
                }
            }
        }
        count
    }

    #[test]
    fn ray_against_circle_follows_frame_convention() {
        let ray = Chain::from(Path::ray(c(0.0, 0.0), c(0.0, 1.0)));
        let circle = Chain::from(Path::circle(c(0.0, 0.0), 0.5));
        // tangents i (ray) and −1 (circle at i/2): cross(i, −1) = +1
        assert_eq!(intersection_number(&ray, &circle).unwrap(), q(1));
        assert_eq!(intersection_number(&circle, &ray).unwrap(), q(-1));
        assert_eq!(brute(&Path::ray(c(0.0, 0.0), c(0.0, 1.0)), &Path::circle(c(0.0, 0.0), 0.5)), 1);
    }

    #[test]
    fn disjoint_chains() {
        let a = Chain::from(Path::circle(c(0.0, 0.0), 1.0));
        let b = Chain::from(Path::segment(c(3.0, 0.0), c(4.0, 1.0)));
        assert!(intersection_number(&a, &b).unwrap().is_zero());
    }

    #[test]
    fn log_family_basis_is_diagonal() {
        let a = c(2.0, 0.0);
        let gammas = [
            Chain::from(Path::ray(c(0.0, 0.0), c(-1.0, 0.0))),
            Chain::from(Path::circle_from(c(1.0, 0.0), 0.4, PI / 2.0)),
        ];
        let deltas = [Chain::from(Path::circle_from(c(0.0, 0.0), 0.4, PI / 2.0)), Chain::from(Path::segment(c(1.0, 0.0), a))];
        let m: Vec<Vec<BigRational>> = gammas
            .iter()
            .map(|g| deltas.iter().map(|d| intersection_number(g, d).unwrap()).collect())
            .collect();
        assert_eq!(m, vec![vec![q(1), q(0)], vec![q(0), q(-1)]]);
    }

    #[test]
    fn degenerate_contacts_are_refused() {
        let seg = Chain::from(Path::segment(c(-1.0, 0.0), c(1.0, 0.0)));
        let touching = Chain::from(Path::segment(c(0.0, 0.0), c(0.0, 1.0)));
        assert!(matches!(intersection_number(&seg, &touching), Err(Error::NonGenericIntersection(_))));
        let tangent = Chain::from(Path::circle(c(0.0, 1.0), 1.0));
        assert!(matches!(intersection_number(&seg, &tangent), Err(Error::NonGenericIntersection(_))));
        let overlap = Chain::from(Path::segment(c(0.5, 0.0), c(2.0, 0.0)));
        assert!(matches!(intersection_number(&seg, &overlap), Err(Error::NonGenericIntersection(_))));
        let rays = (Chain::from(Path::ray(c(0.0, 1.0), c(1.0, 0.0))), Chain::from(Path::ray(c(0.0, -1.0), c(1.0, 0.0))));
        assert!(matches!(intersection_number(&rays.0, &rays.1), Err(Error::NonGenericIntersection(_))));
        let circ = Chain::from(Path::circle(c(0.0, 0.0), 1.0));
        let same = Chain::from(Path::new(vec![Piece::Arc { center: c(0.0, 0.0), radius: 1.0, theta_start: 0.5, theta_end: 1.0 }]).unwrap());
        assert!(matches!(intersection_number(&circ, &same), Err(Error::NonGenericIntersection(_))));
        let tangent_circles = Chain::from(Path::circle(c(2.0, 0.0), 1.0));
        assert!(matches!(intersection_number(&circ, &tangent_circles), Err(Error::NonGenericIntersection(_))));
    }

    #[test]
    fn coefficients_are_bilinear() {
        let a = Chain::new().with_term(q(3), Path::segment(c(0.0, -1.0), c(0.0, 1.0)));
        let b = Chain::new()
            .with_term(BigRational::new(1.into(), 2.into()), Path::segment(c(-1.0, 0.5), c(1.0, 0.5)))
            .with_term(q(-2), Path::segment(c(1.0, -0.5), c(-1.0, -0.5)));
        // vertical up vs rightward: cross(i, 1) = −1; vs leftward: +1
        let expect = q(3) * (BigRational::new((-1).into(), 2.into()) + q(-2));
        assert_eq!(intersection_number(&a, &b).unwrap(), expect);
        assert_eq!(intersection_number(&a, &b.scaled(&q(2))).unwrap(), expect * q(2));
        let _ = BigRational::one();
    }

    fn arb_path() -> impl Strategy<Value = Path> {
        prop_oneof![
            (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64)
                .prop_filter("length", |&(a, b, x, y)| (a - x).hypot(b - y) > 0.1)
                .prop_map(|(a, b, x, y)| Path::segment(c(a, b), c(x, y))),
            (-2.0..2.0f64, -2.0..2.0f64, 0.2..2.0f64, -PI..PI, -2.0 * PI..2.0 * PI)
                .prop_filter("sweep", |t| t.4.abs() > 0.1)
                .prop_map(|(x, y, r, t0, sw)| Path::new(vec![Piece::Arc { center: c(x, y), radius: r, theta_start: t0, theta_end: t0 + sw }]).unwrap()),
            (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64)
                .prop_filter_map("polyline", |(a, b, x, y, u, v)| Path::polyline(&[c(a, b), c(x, y), c(u, v)]).ok()),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn antisymmetric_and_matches_brute_force(a in arb_path(), b in arb_path()) {
            let (ca, cb) = (Chain::from(a.clone()), Chain::from(b.clone()));
            if let (Ok(x), Ok(y)) = (intersection_number(&ca, &cb), intersection_number(&cb, &ca)) {
                prop_assert_eq!(x.clone(), -y);
                prop_assert_eq!(x.to_i64().unwrap(), brute(&a, &b));
                let rev = Chain::from(a.reversed().unwrap());
                prop_assert_eq!(intersection_number(&rev, &cb).unwrap(), -x);
                prop_assert_eq!(rev.boundary(), ca.boundary().negated());
            }
        }
    }
}
