use num::ToPrimitive;
use num_complex::Complex64;

use super::gk::adaptive_1d;
use super::{Estimate, Method, QuadConfig};
use crate::error::{Error, Result};
use crate::forms::LogForm1;
use crate::geom::{Chain, Piece};

fn check_guard(form: &LogForm1, piece: &Piece, guard: f64) -> Result<()> {
    for p in form.finite_poles() {
        let d = piece.distance_to(p);
        if d < guard {
            return Err(Error::PoleOnPath { pole: format!("{p}"), distance: d, guard });
        }
    }
    if matches!(piece, Piece::Ray { .. }) && form.has_pole_at_infinity() {
        return Err(Error::PoleOnPath { pole: "inf".into(), distance: 0.0, guard });
    }
    Ok(())
}

fn integrate_piece(form: &LogForm1, piece: &Piece, cfg: &QuadConfig) -> Result<(Complex64, f64, u64)> {
    check_guard(form, piece, cfg.guard_distance)?;
    let run = |f: &dyn Fn(f64) -> Complex64| adaptive_1d(f, &[0.0, 1.0], cfg.rel_tol, 0.0, cfg.max_subdivisions);
    let r = match *piece {
        Piece::Segment { start, end } => {
            let d = end - start;
            run(&|t| form.eval(start + d * t) * d)?
        }
        Piece::Arc { center, radius, theta_start, theta_end } => {
            let sweep = theta_end - theta_start;
            run(&|s| {
                let e = Complex64::from_polar(radius, theta_start + s * sweep);
                form.eval(center + e) * Complex64::new(0.0, sweep) * e
            })?
        }
        Piece::Ray { start, direction } => run(&|t| {
            let u = 1.0 - t;
            form.eval(start + direction * (t / u)) * direction / (u * u)
        })?,
    };
    Ok((r.value, r.error, r.evals))
}

/// `∫_chain form`, summed over pieces with the chain coefficients.
pub fn integrate_path(form: &LogForm1, chain: &Chain, cfg: &QuadConfig) -> Result<Estimate> {
    cfg.validate()?;
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut evals = 0;
    for term in &chain.terms {
        let c = term.coeff.to_f64().ok_or_else(|| Error::Input("chain coefficient out of range".into()))?;
        for piece in term.path.pieces() {
            let (v, e, n) = integrate_piece(form, piece, cfg)?;
            value += v * c;
            error += e * c.abs();
            evals += n;
        }
    }
    Ok(Estimate { value, abs_error: error, samples_or_evals: evals, method: Method::Adaptive1d })
}

/// `∫_{δ̄} form`: the path is conjugated pointwise, the form is left alone.
pub fn integrate_path_conj(form: &LogForm1, chain: &Chain, cfg: &QuadConfig) -> Result<Estimate> {
    integrate_path(form, &chain.conj(), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Path, ProjPoint};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cfg() -> QuadConfig {
        QuadConfig::path_default()
    }

    #[test]
    fn cauchy_circle() {
        let e = integrate_path(&LogForm1::dz_over(c(0.0, 0.0)), &Path::circle(c(0.0, 0.0), 1.0).into(), &cfg()).unwrap();
        assert!((e.value - c(0.0, 2.0 * PI)).norm() < 1e-12);
        assert!(e.brackets(c(0.0, 2.0 * PI), 1.0) || (e.value - c(0.0, 2.0 * PI)).norm() < 1e-14);
    }

    #[test]
    fn log_segment_and_exact_form() {
        let e = integrate_path(&LogForm1::dz_over(c(0.0, 0.0)), &Path::segment(c(1.0, 0.0), c(2.0, 0.0)).into(), &cfg()).unwrap();
        assert!((e.value.re - 2f64.ln()).abs() < 1e-13 && e.value.im.abs() < 1e-15);
        let a = c(2.0, 0.0);
        let f = LogForm1::constant(1.0 / (a - 1.0));
        let e = integrate_path(&f, &Path::segment(c(1.0, 0.0), a).into(), &cfg()).unwrap();
        assert!((e.value - 1.0).norm() < 1e-14);
    }

    #[test]
    fn ray_to_infinity() {
        // ∫_0^∞ dlog((z−a)/(z−1)) along the negative axis = log(a) (principal)
        let f = LogForm1::dlog_ratio(ProjPoint::finite(2.0, 0.0), ProjPoint::finite(1.0, 0.0)).unwrap();
        let e = integrate_path(&f, &Path::ray(c(0.0, 0.0), c(-1.0, 0.0)).into(), &cfg()).unwrap();
        assert!((e.value.re - (-2f64.ln())).abs() < 1e-9, "{:?}", e);
        // dz/z diverges at infinity
        let r = integrate_path(&LogForm1::dz_over(c(1.0, 0.0)), &Path::ray(c(0.0, 0.0), c(-1.0, 0.0)).into(), &cfg());
        assert!(matches!(r, Err(Error::PoleOnPath { .. })));
    }

    #[test]
    fn guard_is_enforced() {
        let r = integrate_path(&LogForm1::dz_over(c(0.5, 1e-8)), &Path::segment(c(0.0, 0.0), c(1.0, 0.0)).into(), &cfg());
        assert!(matches!(r, Err(Error::PoleOnPath { .. })));
        // just outside the guard still converges
        let e = integrate_path(&LogForm1::dz_over(c(0.5, 1e-5)), &Path::segment(c(0.0, 0.0), c(1.0, 0.0)).into(), &cfg()).unwrap();
        let exact = ((c(1.0, 0.0) - c(0.5, 1e-5)) / (c(0.0, 0.0) - c(0.5, 1e-5))).ln();
        assert!((e.value - exact).norm() <= e.abs_error.max(1e-12));
    }

    #[test]
    fn conjugated_path() {
        // conj of the arc from 1 to i is the arc from 1 to −i
        let arc = Path::new(vec![Piece::Arc { center: c(0.0, 0.0), radius: 1.0, theta_start: 0.0, theta_end: PI / 2.0 }]).unwrap();
        let e = integrate_path_conj(&LogForm1::dz_over(c(0.0, 0.0)), &arc.into(), &cfg()).unwrap();
        assert!((e.value - c(0.0, -PI / 2.0)).norm() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10))]
        #[test]
        fn linear_in_the_form(cr in -2.0..2.0f64, ci in -2.0..2.0f64, p in -3.0..3.0f64, q in 0.3..3.0f64) {
            let f = LogForm1::dz_over(c(p, q));
            let g = LogForm1::dz_over(c(-q, -p.abs() - 0.5)).add(&LogForm1::constant(c(0.3, 0.1)));
            let k = c(cr, ci);
            let chain: Chain = Path::polyline(&[c(-2.0, 0.0), c(0.0, 0.1), c(2.5, -0.2)]).unwrap().into();
            let lhs = integrate_path(&f.scale(k).add(&g), &chain, &cfg()).unwrap();
            let a = integrate_path(&f, &chain, &cfg()).unwrap();
            let b = integrate_path(&g, &chain, &cfg()).unwrap();
            let err = lhs.abs_error + k.norm() * a.abs_error + b.abs_error + 1e-12;
            prop_assert!((lhs.value - (a.value * k + b.value)).norm() <= err);
        }
    }
}
