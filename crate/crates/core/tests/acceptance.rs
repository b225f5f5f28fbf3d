//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runtime budgets are part of each criterion.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use svperiod::cli::selftest::{
    elliptic_point, height_case, log_family_intersections, log_family_s_residuals, random_invertible, random_modulus,
    ELLIPTIC_POINTS, SV_LOG_POINTS,
};
use svperiod::elliptic::{fricke_residual, g2star_modularity_residual, sv_matrix_elliptic};
use svperiod::error::Result;
use svperiod::forms::{check_c0_recipe, LogForm1};
use svperiod::geom::{dual_pairing_matrix, RationalMatrix};
use svperiod::heights::random_divisor_pair;
use svperiod::quad::{cauchy_stokes_pairing, McConfig, QuadConfig, RadialRational};
use svperiod::svcore::{double_copy_check, fubini_check, log_family, mzv_series, sv_log, sv_mzv};

const SEED: u64 = 20_240_601;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn criterion(n: u32, name: &str, budget: Duration, f: impl FnOnce() -> Result<Outcome>) -> bool {
    let start = Instant::now();
    let r = f();
    let t = start.elapsed();
    let (pass, detail) = match r {
        Ok(o) => (o.pass && t <= budget, o.detail),
        Err(e) => (false, format!("error {}: {e}", e.name())),
    };
    println!(
        "{} {n:>2}. {name}: {detail} [{:.1} s, budget {} s]",
        if pass { "PASS" } else { "FAIL" },
        t.as_secs_f64(),
        budget.as_secs()
    );
    pass
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn lefschetz() -> Result<Outcome> {
    let cfg = QuadConfig::sphere_default().with_rel_tol(1e-10);
    let (e, _) = cauchy_stokes_pairing(&LogForm1::dz_over(c(0.0, 0.0)), &RadialRational::lefschetz(), &cfg)?;
    let err = (e.value + 1.0).norm();
    Ok(outcome(err <= 1e-8, format!("value {:.12}, |value + 1| = {err:.2e} ≤ 1e-8", e.value.re)))
}

fn sv_logs() -> Result<Outcome> {
    let cfg = QuadConfig::sphere_default();
    let mut worst: f64 = 0.0;
    for (re, im) in SV_LOG_POINTS {
        let a = c(re, im);
        worst = worst.max((sv_log(a, &cfg)?.estimate.value - 2.0 * a.norm().ln()).norm());
    }
    Ok(outcome(worst <= 1e-6, format!("max |sv_log(a) − 2 ln|a|| = {worst:.2e} ≤ 1e-6 over 5 points")))
}

fn double_copy() -> Result<Outcome> {
    let fam = log_family(c(2.0, 0.0))?;
    let r = double_copy_check(&fam.nu, &fam.omega, &fam.gammas, &fam.deltas, &QuadConfig::sphere_default())?;
    let cap = 1e-4 * 2.0 * PI * 4f64.ln();
    let ce = r.combined_error();
    Ok(outcome(
        r.residual <= 3.0 * ce && ce <= cap,
        format!("|lhs − rhs| = {:.2e} ≤ 3·{ce:.2e}; combined error ≤ {cap:.2e}", r.residual),
    ))
}

fn sv_matrix_relations() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut entry, mut inv): (f64, f64) = (0.0, 0.0);
    for _ in 0..10 {
        let (e, i) = log_family_s_residuals(random_modulus(&mut rng))?;
        entry = entry.max(e);
        inv = inv.max(i);
    }
    Ok(outcome(
        entry <= 1e-6 && inv <= 1e-8,
        format!("10 random a: max entry error {entry:.2e} ≤ 1e-6, max ‖S² − I‖ {inv:.2e} ≤ 1e-8"),
    ))
}

fn duality() -> Result<Outcome> {
    let holds = |m: &RationalMatrix| -> Result<bool> {
        Ok(&dual_pairing_matrix(m)?.transpose() * m == RationalMatrix::identity(m.rows()))
    };
    let basis = holds(&log_family_intersections(c(2.0, 0.0))?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut good = 0;
    for k in 0..20 {
        if holds(&random_invertible(&mut rng, 1 + k % 6))? {
            good += 1;
        }
    }
    Ok(outcome(basis && good == 20, format!("example basis exact: {basis}; random sizes 1–6: {good}/20 exact")))
}

fn c0_recipe() -> Result<Outcome> {
    let mut parts = Vec::new();
    let mut ok = true;
    for n in 1..=3 {
        let r = check_c0_recipe(n)?;
        let bad: usize = r.mismatches.iter().map(Vec::len).sum();
        ok &= bad == 0;
        parts.push(format!("n = {n}: {} cases, {bad} mismatches", r.cases));
    }
    Ok(outcome(ok, parts.join("; ")))
}

fn elliptic() -> Result<Outcome> {
    let (mut fricke, mut modular, mut inv, mut tr, mut det): (f64, f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for k in 0..ELLIPTIC_POINTS.len() {
        let p = elliptic_point(k);
        fricke = fricke.max(fricke_residual(&p, 1e-15)?);
        modular = modular.max(g2star_modularity_residual(p.tau, 1e-15)?);
        let sv = sv_matrix_elliptic(&p, 1e-15)?;
        inv = inv.max(sv.matrix.checks.involution.unwrap_or(f64::INFINITY));
        tr = tr.max(sv.trace.norm());
        det = det.max((sv.determinant + 1.0).norm());
    }
    Ok(outcome(
        fricke <= 1e-8 && modular <= 1e-9 && inv <= 1e-9 && tr <= 1e-9 && det <= 1e-9,
        format!(
            "5 τ: Fricke {fricke:.1e} ≤ 1e-8, modularity {modular:.1e} ≤ 1e-9, ‖S² − I‖ {inv:.1e}, |tr S| {tr:.1e}, |det S + 1| {det:.1e} ≤ 1e-9"
        ),
    ))
}

fn heights() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let cfg = QuadConfig::sphere_default();
    let (mut bad, mut worst_err): (usize, f64) = (0, 0.0);
    for _ in 0..25 {
        let mut probe = rng.clone();
        let (d, e) = random_divisor_pair(&mut probe);
        worst_err = worst_err.max(svperiod::heights::height_pairing(&d, &e, &cfg)?.estimate.abs_error);
        for (residual, tol) in height_case(&mut rng, &cfg)? {
            if residual > tol {
                bad += 1;
            }
        }
    }
    Ok(outcome(
        bad == 0 && worst_err <= 1e-4,
        format!("25 pairs: {bad} of 75 oracle/symmetry/principal checks outside 3·abs_error; max abs_error {worst_err:.1e} ≤ 1e-4"),
    ))
}

fn svmzv() -> Result<Outcome> {
    let mcfg = McConfig::new(10_000_000, SEED);
    let two = sv_mzv(&[2], &mcfg)?;
    let three = sv_mzv(&[3], &mcfg)?;
    let (v2, s2) = (two.estimate.value.re, two.estimate.abs_error);
    let (v3, s3) = (three.estimate.value.re, three.estimate.abs_error);
    let target = 2.0 * mzv_series(&[3], 20)?;
    let ok2 = v2.abs() <= (3.0 * s2).max(0.02) && s2 <= 0.02;
    let ok3 = (v3 - target).abs() <= (3.0 * s3).max(0.12) && s3 <= 0.08;
    Ok(outcome(
        ok2 && ok3,
        format!("ζsv(2) = {v2:.4} ± {s2:.4} (stderr ≤ 0.02); ζsv(3) = {v3:.4} ± {s3:.4} vs {target:.7} (stderr ≤ 0.08); 1e7 samples"),
    ))
}

fn fubini() -> Result<Outcome> {
    let r = fubini_check(c(2.0, 0.0), c(3.0, 0.0), &QuadConfig::sphere_default(), &McConfig::new(2_000_000, SEED))?;
    Ok(outcome(
        r.residual <= 3.0 * r.combined_error,
        format!(
            "product integral {:.4} vs {:.6}: residual {:.2e} ≤ 3·{:.2e}",
            r.product_integral.value.re, r.product, r.residual, r.combined_error
        ),
    ))
}

fn determinism() -> Result<Outcome> {
    let run = || -> std::result::Result<(Value, i32), String> {
        let out = Command::new(env!("CARGO_BIN_EXE_svperiod"))
            .args(["selftest", "fast", "--seed", "7", "--json"])
            .output()
            .map_err(|e| e.to_string())?;
        let mut v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
        v["wall_time_ms"] = Value::from(0);
        Ok((v, out.status.code().unwrap_or(-1)))
    };
    match (run(), run()) {
        (Ok((a, ca)), Ok((b, cb))) => {
            let (ta, tb) = (serde_json::to_string(&a).unwrap_or_default(), serde_json::to_string(&b).unwrap_or_default());
            Ok(outcome(ta == tb, format!("{} bytes each, identical: {}, exit codes {ca} and {cb}", ta.len(), ta == tb)))
        }
        (a, b) => Ok(outcome(false, format!("could not run selftest: {:?} {:?}", a.err(), b.err()))),
    }
}

fn main() {
    let results = [
        criterion(1, "Lefschetz pairing", secs(5), lefschetz),
        criterion(2, "single-valued logarithm", secs(30), sv_logs),
        criterion(3, "double copy at a = 2", secs(60), double_copy),
        criterion(4, "sv matrix relations", secs(60), sv_matrix_relations),
        criterion(5, "intersection/duality exactness", secs(60), duality),
        criterion(6, "c0 dual recipe", secs(60), c0_recipe),
        criterion(7, "elliptic identities", secs(30), elliptic),
        criterion(8, "heights oracle equivalence", secs(300), heights),
        criterion(9, "single-valued zeta values", secs(1800), svmzv),
        criterion(10, "Fubini", secs(600), fubini),
        criterion(11, "determinism of selftest fast", secs(120), determinism),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
