use std::f64::consts::PI;

use num::BigRational;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::commands::{on_real_locus, Options};
use super::report::{Check, Report};
use crate::elliptic::{area_pairing, fricke_residual, g2star_modularity_residual, sv_matrix_elliptic, TauPoint};
use crate::error::Result;
use crate::forms::{check_c0_recipe, LogForm1};
use crate::geom::{dual_pairing_matrix, intersection_number, RationalMatrix};
use crate::heights::{green_closed_form, height_pairing, principal_check, random_divisor_pair, RationalFunction};
use crate::quad::{cauchy_stokes_pairing, QuadConfig, RadialRational};
use crate::svcore::{
    double_copy_check, fubini_check, log_family, mzv_series, period_matrix, sv_log, sv_matrix, sv_mzv,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// Closed-form checks only.
    Fast,
    /// Adds the Monte Carlo runs.
    Full,
}

pub const FULL_MZV_SAMPLES: u64 = 10_000_000;
pub const FULL_FUBINI_SAMPLES: u64 = 2_000_000;

/// Runs `f` and records its residual, or a failed check if it errors.
fn item(rep: &mut Report, name: impl Into<String>, tol: f64, f: impl FnOnce() -> Result<f64>) {
    let name = name.into();
    rep.check(match f() {
        Ok(r) => Check::new(name, r, tol),
        Err(e) => Check::failed(name, tol, &e),
    });
}

/// Like [`item`] for checks whose tolerance is itself computed.
fn item_with_tol(rep: &mut Report, name: impl Into<String>, f: impl FnOnce() -> Result<(f64, f64)>) {
    let name = name.into();
    rep.check(match f() {
        Ok((r, tol)) => Check::new(name, r, tol),
        Err(e) => Check::failed(name, f64::NAN, &e),
    });
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub const SV_LOG_POINTS: [(f64, f64); 5] = [(2.0, 0.0), (3.0, 0.0), (1.0, 1.0), (-5.0, 0.0), (0.3, 0.0)];

/// Real-locus sample points `(τ, λ)`; see [`on_real_locus`].
pub const ELLIPTIC_POINTS: [((f64, f64), (f64, f64)); 5] = [
    ((0.0, 1.0), (1.0, 0.0)),
    ((0.5, 0.866_025_403_784_438_6), (1.0, 0.0)),
    ((0.0, 1.7), (0.0, 0.8)),
    ((0.5, 1.3), (-2.0, 0.0)),
    ((0.0, 0.6), (0.4, 0.0)),
];

fn lefschetz(rep: &mut Report) {
    item(rep, "Lefschetz pairing = −1", 1e-8, || {
        let cfg = QuadConfig::sphere_default().with_rel_tol(1e-10);
        let (e, _) = cauchy_stokes_pairing(&LogForm1::dz_over(c(0.0, 0.0)), &RadialRational::lefschetz(), &cfg)?;
        Ok((e.value + 1.0).norm())
    });
}

fn sv_logs(rep: &mut Report, opts: &Options) {
    let cfg = opts.sphere_cfg(1e-6);
    for (re, im) in SV_LOG_POINTS {
        item(rep, format!("sv_log({}) = 2 ln|a|", c(re, im)), 1e-6, || Ok(sv_log(c(re, im), &cfg)?.residual));
    }
}

fn double_copy(rep: &mut Report, opts: &Options) {
    let target = 2.0 * PI * 4f64.ln();
    let mut combined = f64::NAN;
    item_with_tol(rep, "double copy at a = 2: |lhs − rhs| ≤ 3·error", || {
        let fam = log_family(c(2.0, 0.0))?;
        let r = double_copy_check(&fam.nu, &fam.omega, &fam.gammas, &fam.deltas, &opts.sphere_cfg(1e-6))?;
        combined = r.combined_error();
        Ok((r.residual, 3.0 * combined))
    });
    rep.check(Check::new("double copy at a = 2: combined error", combined, 1e-4 * target));
}

/// `S = [[1, ln|a|²], [0, −1]]` for the logarithm family.
pub fn log_family_s_residuals(a: Complex64) -> Result<(f64, f64)> {
    let fam = log_family(a)?;
    let p = period_matrix(&fam.config, &fam.forms, &fam.chains, &QuadConfig::path_default())?;
    let s = sv_matrix(&p, &p.conj())?;
    let want = [[c(1.0, 0.0), c(2.0 * a.norm().ln(), 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]];
    let mut entry: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            entry = entry.max((s.entries[i][j] - want[i][j]).norm());
        }
    }
    Ok((entry, s.checks.involution.unwrap_or(f64::NAN)))
}

fn log_family_s(rep: &mut Report, rng: &mut ChaCha8Rng) {
    for k in 0..4 {
        let a = random_modulus(rng);
        let label = format!("log family S at a #{k}");
        match log_family_s_residuals(a) {
            Ok((e, inv)) => {
                rep.check(Check::new(format!("{label}: entries"), e, 1e-6).with_detail(format!("a = {a}")));
                rep.check(Check::new(format!("{label}: S² = I"), inv, 1e-8));
            }
            Err(err) => rep.check(Check::failed(label, 1e-6, &err)),
        }
    }
}

/// A modulus in `0.2 ≤ |a| ≤ 5` kept away from `1`.
pub fn random_modulus<R: Rng>(rng: &mut R) -> Complex64 {
    loop {
        let a = Complex64::from_polar(rng.gen_range(0.2..5.0), rng.gen_range(-PI..PI));
        if (a - 1.0).norm() > 0.2 {
            return a;
        }
    }
}

/// Entries in `−3..=3`; retried until invertible.
pub fn random_invertible<R: Rng>(rng: &mut R, n: usize) -> RationalMatrix {
    loop {
        let rows: Vec<Vec<BigRational>> =
            (0..n).map(|_| (0..n).map(|_| BigRational::from_integer(rng.gen_range(-3i64..=3).into())).collect()).collect();
        let m = RationalMatrix::from_rows(rows).expect("square");
        if m.inverse().is_ok() {
            return m;
        }
    }
}

fn duality_holds(m: &RationalMatrix) -> Result<bool> {
    let d = dual_pairing_matrix(m)?;
    Ok(&d.transpose() * m == RationalMatrix::identity(m.rows()))
}

/// Intersection matrix `⟨γᵢ, δⱼ⟩` of the logarithm family basis.
pub fn log_family_intersections(a: Complex64) -> Result<RationalMatrix> {
    let fam = log_family(a)?;
    let mut rows = Vec::new();
    for g in &fam.gammas {
        rows.push(fam.deltas.iter().map(|d| intersection_number(g, d)).collect::<Result<Vec<_>>>()?);
    }
    RationalMatrix::from_rows(rows)
}

fn duality(rep: &mut Report, rng: &mut ChaCha8Rng) {
    item(rep, "duality on the logarithm family basis", 0.0, || {
        Ok(if duality_holds(&log_family_intersections(c(2.0, 0.0))?)? { 0.0 } else { 1.0 })
    });
    let mut bad = 0;
    for k in 0..20 {
        let m = random_invertible(rng, 1 + k % 4);
        if !duality_holds(&m).unwrap_or(false) {
            bad += 1;
        }
    }
    rep.check(Check::new("duality on 20 random integer matrices (failures)", bad as f64, 0.0));
}

fn c0_recipe(rep: &mut Report) {
    for n in 1..=3 {
        item(rep, format!("c0 dual recipe, n = {n} (mismatches)"), 0.0, || {
            Ok(check_c0_recipe(n)?.mismatches.iter().map(|m| m.len()).sum::<usize>() as f64)
        });
    }
}

fn classical_mzv(rep: &mut Report) {
    let z3 = 1.202_056_903_159_594_2;
    for (idx, want) in [
        (vec![2u32], PI * PI / 6.0),
        (vec![3], z3),
        (vec![1, 2], z3),
        (vec![2, 2], PI.powi(4) / 120.0),
        (vec![1, 3], PI.powi(4) / 360.0),
    ] {
        item(rep, format!("classical ζ{idx:?}"), 1e-12, || Ok((mzv_series(&idx, 20)? - want).abs()));
    }
}

pub fn elliptic_point(k: usize) -> TauPoint {
    let ((tr, ti), (lr, li)) = ELLIPTIC_POINTS[k];
    TauPoint::new(c(tr, ti), c(lr, li)).expect("upper half plane")
}

fn elliptic(rep: &mut Report) {
    let eps = 1e-15;
    for k in 0..ELLIPTIC_POINTS.len() {
        let p = elliptic_point(k);
        let label = format!("elliptic τ = {}", p.tau);
        debug_assert!(on_real_locus(p.tau, p.lambda));
        item(rep, format!("{label}: Fricke vs AGM"), 1e-8, || fricke_residual(&p, eps));
        item(rep, format!("{label}: G2* modularity"), 1e-9, || g2star_modularity_residual(p.tau, eps));
        match sv_matrix_elliptic(&p, eps) {
            Ok(sv) => {
                rep.check(Check::new(format!("{label}: S² = I"), sv.matrix.checks.involution.unwrap_or(f64::NAN), 1e-9));
                rep.check(Check::new(format!("{label}: tr S = 0"), sv.trace.norm(), 1e-9));
                rep.check(Check::new(format!("{label}: det S = −1"), (sv.determinant + 1.0).norm(), 1e-9));
                rep.check(Check::new(format!("{label}: Legendre"), sv.data.legendre_residual, 1e-10));
            }
            Err(e) => rep.check(Check::failed(format!("{label}: sv matrix"), 1e-9, &e)),
        }
        item(rep, format!("{label}: area pairing"), 1e-9, || Ok(area_pairing(&p)?.residual));
    }
}

/// Height pairing vs Green's sum, symmetry, and (with `f(z) = (z − x)/(z − y)`
/// built from two fresh points) the principal divisor law.
pub fn height_case<R: Rng>(rng: &mut R, cfg: &QuadConfig) -> Result<[(f64, f64); 3]> {
    let (d, e) = random_divisor_pair(rng);
    let h = height_pairing(&d, &e, cfg)?;
    let back = height_pairing(&e, &d, cfg)?;
    let g = green_closed_form(&d, &e)?;
    let err = h.estimate.abs_error.max(back.estimate.abs_error);
    let floor = 1e-12 * g.abs().max(1.0);
    let oracle = ((h.estimate.value.re - g).abs(), 3.0 * h.estimate.abs_error + floor);
    let sym = ((h.estimate.value.re - back.estimate.value.re).abs(), 6.0 * err + floor);
    // zeros and poles kept off the support of d
    let fresh = |rng: &mut R| loop {
        let z = Complex64::from_polar(4.0 * rng.gen::<f64>().sqrt(), rng.gen_range(-PI..PI));
        if d.terms().iter().all(|(_, p)| p.as_finite().is_none_or(|w| (w - z).norm() > 0.25)) {
            return z;
        }
    };
    let (x, y) = (fresh(rng), fresh(rng));
    let f = RationalFunction {
        zeros: vec![(x.into(), 1)],
        poles: vec![(y.into(), 1)],
        leading: Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(-PI..PI)),
    };
    let law = {
        let pc = principal_check(&d, &f, cfg)?;
        (pc.residual, 3.0 * pc.pairing.estimate.abs_error + 1e-12 * pc.predicted.abs().max(1.0))
    };
    Ok([oracle, sym, law])
}

fn heights(rep: &mut Report, rng: &mut ChaCha8Rng, opts: &Options) {
    let cfg = opts.sphere_cfg(1e-6);
    for k in 0..5 {
        let label = format!("height pair #{k}");
        match height_case(rng, &cfg) {
            Ok([oracle, sym, law]) => {
                rep.check(Check::new(format!("{label}: pairing = Green's sum"), oracle.0, oracle.1));
                rep.check(Check::new(format!("{label}: symmetry"), sym.0, sym.1));
                rep.check(Check::new(format!("{label}: principal law"), law.0, law.1));
            }
            Err(e) => rep.check(Check::failed(label, 1e-4, &e)),
        }
    }
}

fn monte_carlo(rep: &mut Report, opts: &Options) {
    let mcfg = opts.mc_cfg(FULL_MZV_SAMPLES);
    let z3 = mzv_series(&[3], 20).unwrap_or(f64::NAN);
    match sv_mzv(&[2], &mcfg) {
        Ok(r) => {
            let s = r.estimate.abs_error;
            rep.check(Check::new("ζsv(2) = 0", r.estimate.value.re.abs(), (3.0 * s).max(0.02)));
            rep.check(Check::new("ζsv(2) stderr", s, 0.02));
        }
        Err(e) => rep.check(Check::failed("ζsv(2)", 0.02, &e)),
    }
    match sv_mzv(&[3], &mcfg) {
        Ok(r) => {
            let s = r.estimate.abs_error;
            rep.check(Check::new("ζsv(3) = 2ζ(3)", (r.estimate.value.re - 2.0 * z3).abs(), (3.0 * s).max(0.12)));
            rep.check(Check::new("ζsv(3) stderr", s, 0.08));
        }
        Err(e) => rep.check(Check::failed("ζsv(3)", 0.12, &e)),
    }
    let fcfg = opts.mc_cfg(FULL_FUBINI_SAMPLES);
    item_with_tol(rep, "Fubini at (2, 3): residual ≤ 3·error", || {
        let r = fubini_check(c(2.0, 0.0), c(3.0, 0.0), &opts.sphere_cfg(1e-6), &fcfg)?;
        Ok((r.residual, 3.0 * r.combined_error))
    });
}

pub fn cmd_selftest(level: Level, opts: &Options) -> Result<Report> {
    let mut rep = Report::new("selftest", json!({ "args": { "level": level }, "options": { "seed": opts.seed() } }), opts.seed());
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed());
    lefschetz(&mut rep);
    sv_logs(&mut rep, opts);
    double_copy(&mut rep, opts);
    log_family_s(&mut rep, &mut rng);
    duality(&mut rep, &mut rng);
    c0_recipe(&mut rep);
    classical_mzv(&mut rep);
    elliptic(&mut rep);
    heights(&mut rep, &mut rng, opts);
    if level == Level::Full {
        monte_carlo(&mut rep, opts);
    }
    let passed = rep.checks.iter().filter(|c| c.pass).count();
    rep.set("checks_run", rep.checks.len());
    rep.set("checks_passed", passed);
    Ok(rep)
}
