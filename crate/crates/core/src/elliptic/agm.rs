//! Independent periods of `y² = 4x³ − ux − v` by the complex AGM.
//!
//! For a labelling `e₁, e₂, e₃` of the roots, `M = AGM(√(e₁−e₃), √(e₁−e₂))`
//! with the "right" square root at each step gives a period `ω = π/M` of
//! `dx/y`, and the matching period of `x dx/y` is
//! `η = ω·(e₃ + Σ_{n≥0} 2^{n−1} c_n²)` with `c₀² = e₂ − e₃` and
//! `c_{n+1} = (a_n − b_n)/2`. The three cyclic labellings give three
//! (not always distinct) lattice vectors.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Roots of `4x³ − ux − v`, polished by Newton steps.
pub fn cubic_roots(u: Complex64, v: Complex64) -> [Complex64; 3] {
    // depressed cubic x³ + px + q
    let (p, q) = (-u / 4.0, -v / 4.0);
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    // the sign avoiding cancellation
    let (plus, minus) = (-q / 2.0 + disc, -q / 2.0 - disc);
    let c = if plus.norm() >= minus.norm() { plus } else { minus }.cbrt();
    let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let mut roots = [Complex64::new(0.0, 0.0); 3];
    for (k, r) in roots.iter_mut().enumerate() {
        let ck = c * w.powu(k as u32);
        *r = if ck.norm() < 1e-300 { ck } else { ck - p / (3.0 * ck) };
        for _ in 0..3 {
            let f = *r * *r * *r + p * *r + q;
            let df = 3.0 * *r * *r + p;
            if df.norm() > 0.0 {
                *r -= f / df;
            }
        }
    }
    roots
}

fn right_root(a: Complex64, b: Complex64) -> Complex64 {
    // the square root of ab closer to the arithmetic mean
    let s = (a * b).sqrt();
    let m = (a + b) / 2.0;
    if (m - s).norm() <= (m + s).norm() {
        s
    } else {
        -s
    }
}

/// `(ω, η)` for the labelling `(e₁, e₂, e₃)`.
pub fn agm_period(e1: Complex64, e2: Complex64, e3: Complex64) -> Option<(Complex64, Complex64)> {
    let mut a = (e1 - e3).sqrt();
    let mut b = (e1 - e2).sqrt();
    if (a - b).norm() > (a + b).norm() {
        b = -b;
    }
    if a.norm() == 0.0 || b.norm() == 0.0 {
        return None;
    }
    let mut sum = (e2 - e3) / 2.0;
    let mut pow = 1.0;
    for _ in 0..64 {
        if (a - b).norm() <= 4.0 * f64::EPSILON * a.norm() {
            let omega = PI / a;
            return Some((omega, omega * (e3 + sum)));
        }
        let c = (a - b) / 2.0;
        let next_b = right_root(a, b);
        a = (a + b) / 2.0;
        b = next_b;
        sum += c * c * pow;
        pow *= 2.0;
    }
    None
}

/// All cyclic labellings of the roots.
pub fn agm_periods(u: Complex64, v: Complex64) -> Vec<(Complex64, Complex64)> {
    let r = cubic_roots(u, v);
    (0..3).filter_map(|s| agm_period(r[s], r[(s + 1) % 3], r[(s + 2) % 3])).collect()
}

/// Coordinates of `w` in the real basis `(w1, w2)` of `ℂ`.
pub(crate) fn lattice_coords(w: Complex64, w1: Complex64, w2: Complex64) -> Result<(f64, f64)> {
    let det = w1.re * w2.im - w2.re * w1.im;
    if det.abs() <= 1e-300 {
        return Err(Error::Input("degenerate lattice".into()));
    }
    Ok(((w.re * w2.im - w2.re * w.im) / det, (w1.re * w.im - w.re * w1.im) / det))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_a_split_cubic() {
        // 4(x−1)(x−2)(x+3) = 4x³ − 28x + 24
        let r = cubic_roots(Complex64::new(28.0, 0.0), Complex64::new(-24.0, 0.0));
        let mut re: Vec<f64> = r.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        for (x, y) in re.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((x - y).abs() < 1e-13);
        }
        assert!(r.iter().all(|z| z.im.abs() < 1e-13));
    }

    #[test]
    fn roots_when_u_vanishes() {
        // 4x³ − v with u at rounding level: the cube roots of v/4
        let v = Complex64::new(-0.0133, 0.0);
        let r = cubic_roots(Complex64::new(-1.5e-15, 1e-17), v);
        for z in r {
            assert!((4.0 * z * z * z - v).norm() < 1e-15, "{r:?}");
        }
        let w = (v / 4.0).cbrt();
        assert!(r.iter().all(|z| (z.norm() - w.norm()).abs() < 1e-14));
    }

    #[test]
    fn lemniscatic_real_period() {
        // y² = 4x³ − 4x: real period 2·∫_1^∞ dx/√(4x³−4x) = Γ(1/4)²/(2√(2π))
        let gamma_quarter = 3.625_609_908_221_908;
        let expected = gamma_quarter * gamma_quarter / (2.0 * (2.0 * PI).sqrt());
        let periods = agm_periods(Complex64::new(4.0, 0.0), Complex64::new(0.0, 0.0));
        assert!(periods.iter().any(|(w, _)| (w.norm() - expected).abs() < 1e-12), "{periods:?}");
    }
}
