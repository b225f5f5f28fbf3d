//! Cross-module invariants as property tests.

use std::f64::consts::PI;

use num::BigRational;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use svperiod::cli::Check;
use svperiod::elliptic::{g2star_modularity_residual, sv_closed_form, sv_matrix_elliptic, TauPoint};
use svperiod::forms::LogForm1;
use svperiod::geom::ProjPoint;
use svperiod::heights::{green_closed_form, height_pairing, random_divisor_pair, DivisorDeg0};
use svperiod::quad::{integrate_sphere, sphere_pairing_closed_form, QuadConfig};
use svperiod::svcore::{double_copy_check, log_family, sv_log, sv_mzv};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sphere() -> QuadConfig {
    QuadConfig::sphere_default()
}

/// Points in `|z| ≤ 3`, pairwise at least `0.3` apart.
fn separated(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), n)
        .prop_map(|v| v.into_iter().map(|(x, y)| c(x, y)).collect::<Vec<_>>())
        .prop_filter("separated", |v| {
            v.iter().enumerate().all(|(i, a)| v[i + 1..].iter().all(|b| (a - b).norm() >= 0.3))
        })
}

fn modulus() -> impl Strategy<Value = Complex64> {
    (1.2..5.0f64, -PI..PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn add(d: &DivisorDeg0, e: &DivisorDeg0) -> DivisorDeg0 {
    let mut terms: Vec<(BigRational, ProjPoint)> = d.terms().to_vec();
    for (n, p) in e.terms() {
        match terms.iter_mut().find(|(_, q)| q.approx_eq(p)) {
            Some(t) => t.0 += n,
            None => terms.push((n.clone(), *p)),
        }
    }
    DivisorDeg0::new(terms).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn sphere_conjugation_symmetry(p in separated(4)) {
        let nu = LogForm1::dlog_ratio(p[0].into(), p[1].into()).unwrap();
        let omega = LogForm1::dlog_ratio(p[2].into(), p[3].into()).unwrap();
        let a = integrate_sphere(&nu, &omega, &sphere()).unwrap();
        let b = integrate_sphere(&omega, &nu, &sphere()).unwrap();
        prop_assert!((a.value + b.value.conj()).norm() <= a.abs_error + b.abs_error + 1e-12);
        // error honesty against the closed form
        let exact = sphere_pairing_closed_form(&nu, &omega).unwrap();
        prop_assert!((a.value - exact).norm() <= a.abs_error + 1e-12, "{:?} vs {}", a, exact);
        // determinism
        prop_assert_eq!(integrate_sphere(&nu, &omega, &sphere()).unwrap(), a);
    }

    #[test]
    fn double_copy_on_the_log_family(a in modulus()) {
        let fam = log_family(a).unwrap();
        let r = double_copy_check(&fam.nu, &fam.omega, &fam.gammas, &fam.deltas, &sphere()).unwrap();
        prop_assert!(r.residual <= 3.0 * r.combined_error(), "{:?}", r);
        let closed = c(0.0, 2.0 * PI) * a.norm_sqr().ln();
        prop_assert!((r.rhs - closed).norm() <= 1e-8 * closed.norm().max(1.0));
    }

    #[test]
    fn sv_log_symmetries(a in modulus()) {
        let cfg = sphere();
        let x = sv_log(a, &cfg).unwrap();
        let conj = sv_log(a.conj(), &cfg).unwrap();
        let inv = sv_log(1.0 / a, &cfg).unwrap();
        let tol = |e: f64| 3.0 * (x.estimate.abs_error + e) + 1e-12;
        prop_assert!((x.estimate.value - conj.estimate.value).norm() <= tol(conj.estimate.abs_error));
        prop_assert!((x.estimate.value + inv.estimate.value).norm() <= tol(inv.estimate.abs_error));
    }

    #[test]
    fn elliptic_structure(tr in -0.5..0.5f64, ti in 0.6..2.5f64, lr in -2.0..2.0f64, li in -2.0..2.0f64) {
        prop_assume!(lr.hypot(li) > 0.2);
        let (tau, lambda) = (c(tr, ti), c(lr, li));
        let sv = sv_matrix_elliptic(&TauPoint::new(tau, lambda).unwrap(), 1e-15).unwrap();
        let scale = sv.matrix.entries.iter().flatten().fold(1.0f64, |m, z| m.max(z.norm()));
        prop_assert!((sv.determinant + 1.0).norm() <= 1e-9 * scale);
        prop_assert!(sv.matrix.checks.s_sbar <= 1e-9 * scale);
        prop_assert!(sv.periods_residual <= 1e-9 * scale);
        // λ-equivariance against the λ = 1 matrix
        let base = sv_matrix_elliptic(&TauPoint::new(tau, c(1.0, 0.0)).unwrap(), 1e-15).unwrap();
        let l = [lambda.conj().inv(), lambda.conj()];
        let r = [lambda, lambda.inv()];
        for i in 0..2 {
            for j in 0..2 {
                let want = l[i] * base.matrix.entries[i][j] * r[j];
                prop_assert!((sv.matrix.entries[i][j] - want).norm() <= 1e-12 * scale);
            }
        }
        let m = base.data.m_tau;
        let closed = sv_closed_form(tau, c(1.0, 0.0), m);
        prop_assert!((closed[0][1] - base.matrix.entries[0][1]).norm() <= 1e-12 * scale);
        prop_assert!(g2star_modularity_residual(tau, 1e-15).unwrap() <= 1e-9);
    }

    #[test]
    fn heights_bilinear_symmetric_real(seed in 0u64..1_000_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (d, e) = random_divisor_pair(&mut rng);
        let cfg = sphere();
        let h = height_pairing(&d, &e, &cfg).unwrap();
        let err = h.estimate.abs_error;
        prop_assert!(err <= 1e-4);
        let g = green_closed_form(&d, &e).unwrap();
        prop_assert!((h.estimate.value.re - g).abs() <= 3.0 * err + 1e-12);
        prop_assert!(h.imaginary_part.abs() <= err + 1e-12);
        let back = height_pairing(&e, &d, &cfg).unwrap();
        prop_assert!((h.estimate.value.re - back.estimate.value.re).abs() <= 3.0 * (err + back.estimate.abs_error) + 1e-12);
        // additivity in the first slot, scaling by an integer
        let (d2, _) = random_divisor_pair(&mut rng);
        prop_assume!(d2.terms().iter().all(|(_, p)| e.coefficient(p) == BigRational::from_integer(0.into())));
        let sum = add(&d, &d2);
        let h2 = height_pairing(&d2, &e, &cfg).unwrap();
        let hs = height_pairing(&sum, &e, &cfg).unwrap();
        let bound = 3.0 * (err + h2.estimate.abs_error + hs.estimate.abs_error) + 1e-12;
        prop_assert!((hs.estimate.value.re - h.estimate.value.re - h2.estimate.value.re).abs() <= bound);
        let three = d.scaled(&BigRational::from_integer(3.into()));
        let h3 = height_pairing(&three, &e, &cfg).unwrap();
        prop_assert!((h3.estimate.value.re - 3.0 * h.estimate.value.re).abs() <= 3.0 * (3.0 * err + h3.estimate.abs_error) + 1e-12);
    }

    #[test]
    fn check_passes_iff_residual_within_tolerance(r in -1.0..1.0f64, t in 0.0..1.0f64) {
        let ck = Check::new("x", r.abs(), t);
        prop_assert_eq!(ck.pass, r.abs() <= t);
        let back: Check = serde_json::from_str(&serde_json::to_string(&ck).unwrap()).unwrap();
        prop_assert_eq!(back, ck);
    }
}

#[test]
fn sv_mzv_is_real() {
    let mcfg = svperiod::quad::McConfig::new(200_000, 5);
    for idx in [vec![2u32], vec![3], vec![1, 2]] {
        let r = sv_mzv(&idx, &mcfg).unwrap();
        assert!(r.imaginary_part.abs() <= 3.0 * r.estimate.abs_error, "{idx:?}: {r:?}");
    }
}

#[test]
fn nan_residual_never_passes() {
    assert!(!Check::new("x", f64::NAN, 1.0).pass);
    assert!(!Check::new("x", f64::INFINITY, f64::INFINITY).pass);
}
