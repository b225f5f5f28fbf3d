//! One function per subcommand, each taking a typed input (the same type
//! fixtures carry) and producing a [`Report`].

use std::f64::consts::PI;
use std::path::{Path as FsPath, PathBuf};

use num::ToPrimitive;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::report::{cjson, Check, Report};
use crate::elliptic::{area_pairing, fricke_residual, g2star_modularity_residual, sv_matrix_elliptic, TauPoint};
use crate::error::{Error, Result};
use crate::forms::LogForm1;
use crate::geom::{validate_configuration, Chain, ProjPoint};
use crate::heights::{green_closed_form, height_pairing, principal_check, DivisorDeg0, RationalFunction};
use crate::json::{complex_serde, complex_vec_serde};
use crate::quad::{McConfig, QuadConfig};
use crate::svcore::{self, double_copy_check, log_family, mzv_series, sv_matrix};

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Options {
    pub tol: Option<f64>,
    pub max_subdiv: Option<usize>,
    pub samples: Option<u64>,
    pub chunks: Option<usize>,
    pub seed: Option<u64>,
    #[serde(skip)]
    pub fixtures: Option<PathBuf>,
}

pub const DEFAULT_SEED: u64 = 1;

impl Options {
    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    /// Sphere quadrature aiming two digits below the check tolerance.
    pub fn sphere_cfg(&self, check_tol: f64) -> QuadConfig {
        let mut cfg = QuadConfig::sphere_default().with_rel_tol((check_tol / 100.0).clamp(1e-12, 1e-6));
        if let Some(m) = self.max_subdiv {
            cfg.max_subdivisions = m;
        }
        cfg
    }

    pub fn path_cfg(&self) -> QuadConfig {
        let mut cfg = QuadConfig::path_default();
        if let Some(m) = self.max_subdiv {
            cfg.max_subdivisions = m;
        }
        cfg
    }

    pub fn mc_cfg(&self, default_samples: u64) -> McConfig {
        let mut m = McConfig::new(self.samples.unwrap_or(default_samples), self.seed());
        if let Some(c) = self.chunks {
            m.chunks = c;
        }
        m
    }

    fn echo(&self, args: impl Serialize, tol: f64) -> Value {
        json!({
            "args": args,
            "options": {
                "tol": tol,
                "max_subdiv": self.max_subdiv,
                "samples": self.samples,
                "chunks": self.chunks,
                "seed": self.seed(),
            }
        })
    }

    /// Reads inline JSON, or a file (looked up under `--fixtures` if the path
    /// does not exist as given).
    pub fn read_json(&self, arg: &str) -> Result<Value> {
        let t = arg.trim_start();
        let text = if t.starts_with('[') || t.starts_with('{') {
            arg.to_string()
        } else {
            let mut path = PathBuf::from(arg);
            if !path.exists() {
                if let Some(dir) = &self.fixtures {
                    path = dir.join(arg);
                }
            }
            std::fs::read_to_string(&path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?
        };
        serde_json::from_str(&text).map_err(|e| Error::Input(format!("malformed JSON in {arg}: {e}")))
    }
}

pub fn from_value<T: serde::de::DeserializeOwned>(v: Value, what: &str) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Input(format!("invalid {what}: {e}")))
}

/// Parses `2`, `-5`, `i`, `-i`, `1+i`, `0.3-2.5i`, `1e-3+2e2i` or `[re, im]`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || Error::Input(format!("cannot parse complex number {s:?}"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.starts_with('[') {
        let v: [f64; 2] = serde_json::from_str(&t).map_err(|_| bad())?;
        return Ok(Complex64::new(v[0], v[1]));
    }
    let z = if let Some(body) = t.strip_suffix('i') {
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            x => x.parse().map_err(|_| bad())?,
        };
        Complex64::new(re.parse().map_err(|_| bad())?, im)
    } else {
        Complex64::new(t.parse().map_err(|_| bad())?, 0.0)
    };
    if z.is_finite() {
        Ok(z)
    } else {
        Err(bad())
    }
}

/// Parses a sample count such as `2e6` or `1000000`.
pub fn parse_count(s: &str) -> Result<u64> {
    let x: f64 = s.trim().parse().map_err(|_| Error::Input(format!("cannot parse count {s:?}")))?;
    if x >= 1.0 && x.fract() == 0.0 && x < 2f64.powi(63) {
        Ok(x as u64)
    } else {
        Err(Error::Input(format!("count must be a positive integer, got {s:?}")))
    }
}

fn floor(x: f64) -> f64 {
    1e-12 * x.abs().max(1.0)
}

// ---------------------------------------------------------------- sv-log

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvLogInput {
    #[serde(with = "complex_serde")]
    pub a: Complex64,
}

pub fn cmd_sv_log(input: &SvLogInput, opts: &Options) -> Result<Report> {
    let tol = opts.tol_or(1e-6);
    let mut rep = Report::new("sv-log", opts.echo(input, tol), opts.seed());
    let r = svcore::sv_log(input.a, &opts.sphere_cfg(tol))?;
    rep.set("value", cjson(r.estimate.value));
    rep.set("direct", r.direct);
    rep.set("residual", r.residual);
    rep.abs_error = r.estimate.abs_error;
    rep.evals = r.estimate.samples_or_evals;
    rep.check(Check::new("sv_log = 2 ln|a|", r.residual, tol));
    Ok(rep)
}

// ---------------------------------------------------------------- double-copy

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DoubleCopyInput {
    /// Explicit forms and cycles.
    Explicit { nu: LogForm1, omega: LogForm1, gammas: Vec<Chain>, deltas: Vec<Chain> },
    /// The logarithm family at each listed `a`.
    LogFamily {
        #[serde(with = "complex_vec_serde")]
        a: Vec<Complex64>,
    },
}

#[derive(Deserialize)]
struct ExplicitConfig {
    nu: LogForm1,
    omega: LogForm1,
    gammas: Vec<Chain>,
    deltas: Vec<Chain>,
}

/// Like [`from_value`], but reports the underlying parse error of the
/// variant the object is shaped like.
pub fn parse_double_copy(v: Value) -> Result<DoubleCopyInput> {
    if v.get("nu").is_some() {
        let c: ExplicitConfig = from_value(v, "double-copy configuration")?;
        Ok(DoubleCopyInput::Explicit { nu: c.nu, omega: c.omega, gammas: c.gammas, deltas: c.deltas })
    } else {
        from_value(v, "double-copy configuration")
    }
}

pub fn cmd_double_copy(input: &DoubleCopyInput, opts: &Options) -> Result<Report> {
    let tol = opts.tol_or(1e-5);
    let mut rep = Report::new("double-copy", opts.echo(input, tol), opts.seed());
    let cfg = opts.sphere_cfg(tol);
    let run = |rep: &mut Report, label: &str, nu: &LogForm1, omega: &LogForm1, g: &[Chain], d: &[Chain]| {
        let r = double_copy_check(nu, omega, g, d, &cfg)?;
        let scale = r.rhs.norm().max(1.0);
        rep.check(
            Check::new(format!("double copy{label}: |lhs − rhs|"), r.residual, (tol * scale).max(3.0 * r.combined_error()))
                .with_detail("tolerance is max(tol·|rhs|, 3·combined error)"),
        );
        rep.check(Check::new(format!("double copy{label}: combined error"), r.combined_error(), tol * scale));
        rep.abs_error = rep.abs_error.max(r.combined_error());
        rep.evals += r.lhs.samples_or_evals;
        Ok::<_, Error>(r)
    };
    match input {
        DoubleCopyInput::Explicit { nu, omega, gammas, deltas } => {
            let r = run(&mut rep, "", nu, omega, gammas, deltas)?;
            rep.set("lhs", cjson(r.lhs.value));
            rep.set("rhs", cjson(r.rhs));
            rep.set("residual", r.residual);
            rep.set("combined_error", r.combined_error());
            rep.set("intersection_matrix", &r.intersection_matrix);
            rep.set("detail", &r);
        }
        DoubleCopyInput::LogFamily { a } => {
            if a.is_empty() {
                return Err(Error::Input("double-copy needs a configuration file or at least one --a".into()));
            }
            let mut runs = Vec::new();
            for &x in a {
                let fam = log_family(x)?;
                let label = format!(" [a = {}]", ProjPoint::Finite(x));
                let r = run(&mut rep, &label, &fam.nu, &fam.omega, &fam.gammas, &fam.deltas)?;
                let closed = Complex64::new(0.0, 2.0 * PI) * 2.0 * x.norm().ln();
                rep.check(Check::new(
                    format!("double copy{label}: rhs = 2πi ln|a|²"),
                    (r.rhs - closed).norm(),
                    tol * closed.norm().max(1.0),
                ));
                runs.push(json!({
                    "a": cjson(x),
                    "lhs": cjson(r.lhs.value),
                    "rhs": cjson(r.rhs),
                    "residual": r.residual,
                    "combined_error": r.combined_error(),
                    "intersection_matrix": &r.intersection_matrix,
                }));
            }
            rep.set("runs", runs);
        }
    }
    Ok(rep)
}

// ---------------------------------------------------------------- sv-mzv

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvMzvInput {
    pub indices: Vec<u32>,
}

/// Known values: `ζ^sv(n) = 2ζ(n)` for odd `n` and `0` for even `n`; every
/// weight-2 value vanishes and every weight-3 value is `2ζ(3)`.
pub fn sv_mzv_oracle(indices: &[u32]) -> Result<Option<f64>> {
    let w: u32 = indices.iter().sum();
    Ok(match (indices.len(), w) {
        (_, 2) => Some(0.0),
        (_, 3) => Some(2.0 * mzv_series(&[3], 20)?),
        (1, w) if w % 2 == 0 => Some(0.0),
        (1, w) => Some(2.0 * mzv_series(&[w], 20)?),
        _ => None,
    })
}

pub const DEFAULT_MZV_SAMPLES: u64 = 1_000_000;

pub fn cmd_sv_mzv(input: &SvMzvInput, opts: &Options) -> Result<Report> {
    let tol = opts.tol_or(0.0);
    let mcfg = opts.mc_cfg(DEFAULT_MZV_SAMPLES);
    let mut rep = Report::new("sv-mzv", opts.echo(input, tol), mcfg.seed);
    let r = svcore::sv_mzv(&input.indices, &mcfg)?;
    let sigma = r.estimate.abs_error;
    rep.set("value", r.estimate.value.re);
    rep.set("stderr", sigma);
    rep.set("imaginary_part", r.imaginary_part);
    rep.set("variance_growth", r.variance_growth);
    rep.set("chunk_spread", r.chunk_spread);
    rep.abs_error = sigma;
    rep.evals = r.estimate.samples_or_evals;
    let oracle = sv_mzv_oracle(&input.indices)?;
    rep.set("expected", oracle);
    if let Some(v) = oracle {
        rep.check(
            Check::new("sv_mzv vs known value", (r.estimate.value.re - v).abs(), (3.0 * sigma).max(tol))
                .with_detail("tolerance is max(3·stderr, tol)"),
        );
    }
    rep.check(Check::new("imaginary part", r.imaginary_part.abs(), (3.0 * sigma).max(tol)));
    Ok(rep)
}

// ---------------------------------------------------------------- elliptic

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn default_eps() -> f64 {
    1e-15
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipticInput {
    #[serde(with = "complex_serde")]
    pub tau: Complex64,
    #[serde(with = "complex_serde", default = "one")]
    pub lambda: Complex64,
    #[serde(default = "default_eps")]
    pub eps: f64,
}

/// `S` is real exactly when `Re τ ∈ ½ℤ` and `λ ∈ ℝ ∪ iℝ`; only then are
/// `S² = I` and `tr S = 0` expected.
pub fn on_real_locus(tau: Complex64, lambda: Complex64) -> bool {
    let r = 2.0 * tau.re;
    (r - r.round()).abs() <= 1e-12 && (lambda.im.abs() <= 1e-12 * lambda.norm() || lambda.re.abs() <= 1e-12 * lambda.norm())
}

pub fn cmd_elliptic(input: &EllipticInput, opts: &Options) -> Result<Report> {
    let tol = opts.tol_or(1e-9);
    let mut rep = Report::new("elliptic", opts.echo(input, tol), opts.seed());
    let p = TauPoint::new(input.tau, input.lambda)?;
    let sv = sv_matrix_elliptic(&p, input.eps)?;
    let d = &sv.data;
    let g2star = d.g2q + 1.0 / (8.0 * PI * input.tau.im);
    let area = area_pairing(&p)?;
    rep.set("omega1", cjson(d.omega1));
    rep.set("omega2", cjson(d.omega2));
    rep.set("eta1", cjson(d.eta1));
    rep.set("eta2", cjson(d.eta2));
    rep.set("g2", cjson(d.g2q));
    rep.set("g4", cjson(d.g4q));
    rep.set("g6", cjson(d.g6q));
    rep.set("g2star", cjson(g2star));
    rep.set("m_tau", cjson(d.m_tau));
    rep.set("u", cjson(d.u));
    rep.set("v", cjson(d.v));
    rep.set("sv_matrix", sv.matrix.entries.iter().map(|r| r.iter().map(|z| cjson(*z)).collect::<Vec<_>>()).collect::<Vec<_>>());
    rep.set("trace", cjson(sv.trace));
    rep.set("determinant", cjson(sv.determinant));
    rep.set("area_pairing", area.closed_form);
    let real = on_real_locus(input.tau, input.lambda);
    rep.set("real_locus", real);

    let scale = sv.matrix.entries.iter().flatten().fold(1.0f64, |m, z| m.max(z.norm()));
    rep.check(Check::new("Legendre relation", d.legendre_residual, 1e-12 * d.omega1.norm().max(1.0) * d.eta2.norm().max(1.0)));
    match fricke_residual(&p, input.eps) {
        Ok(r) => rep.check(Check::new("Fricke vs AGM quasi-period", r, tol.max(1e-8))),
        Err(e) => rep.check(Check::failed("Fricke vs AGM quasi-period", tol.max(1e-8), &e)),
    }
    rep.check(Check::new("G2* weight-2 modularity", g2star_modularity_residual(input.tau, input.eps)?, tol));
    rep.check(Check::new("closed form = P̄⁻¹P", sv.periods_residual, tol * scale));
    rep.check(Check::new("S·S̄ = I", sv.matrix.checks.s_sbar, tol * scale));
    rep.check(Check::new("det S = −1", (sv.determinant + 1.0).norm(), tol * scale));
    if real {
        rep.check(Check::new("S² = I", sv.matrix.checks.involution.unwrap_or(f64::NAN), tol * scale));
        rep.check(Check::new("tr S = 0", sv.trace.norm(), tol * scale));
    }
    rep.check(Check::new("area pairing by cubature", area.residual, 1e-10 * area.closed_form.abs().max(1.0)));
    Ok(rep)
}

// ---------------------------------------------------------------- height

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightInput {
    pub d: DivisorDeg0,
    pub e: DivisorDeg0,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<RationalFunction>,
}

pub fn cmd_height(input: &HeightInput, opts: &Options) -> Result<Report> {
    let tol = opts.tol_or(1e-4);
    let mut rep = Report::new("height", opts.echo(input, tol), opts.seed());
    let cfg = opts.sphere_cfg(tol);
    let h = height_pairing(&input.d, &input.e, &cfg)?;
    let back = height_pairing(&input.e, &input.d, &cfg)?;
    let g = green_closed_form(&input.d, &input.e)?;
    let (v, err) = (h.estimate.value.re, h.estimate.abs_error);
    rep.set("value", v);
    rep.set("green", g);
    rep.set("swapped", back.estimate.value.re);
    rep.set("imaginary_part", h.imaginary_part);
    rep.abs_error = err;
    rep.evals = h.estimate.samples_or_evals + back.estimate.samples_or_evals;
    rep.check(Check::new("pairing = Green's sum", (v - g).abs(), 3.0 * err + floor(g)));
    rep.check(Check::new("error bound", err, tol));
    rep.check(Check::new("realness", h.imaginary_part.abs(), err + floor(v)));
    rep.check(Check::new(
        "symmetry",
        (v - back.estimate.value.re).abs(),
        3.0 * (err + back.estimate.abs_error) + floor(v),
    ));
    if let Some(f) = &input.f {
        let c = principal_check(&input.d, f, &cfg)?;
        rep.set("principal_predicted", c.predicted);
        rep.set("principal_pairing", c.pairing.estimate.value.re);
        rep.check(Check::new(
            "principal divisor law",
            c.residual,
            3.0 * c.pairing.estimate.abs_error + floor(c.predicted),
        ));
    }
    Ok(rep)
}

// ---------------------------------------------------------------- period-matrix

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodMatrixInput {
    pub a: Vec<ProjPoint>,
    pub b: Vec<ProjPoint>,
    pub forms: Vec<LogForm1>,
    pub chains: Vec<Chain>,
}

pub fn cmd_period_matrix(input: &PeriodMatrixInput, opts: &Options) -> Result<Report> {
    let tol = opts.tol_or(1e-8);
    let mut rep = Report::new("period-matrix", opts.echo(input, tol), opts.seed());
    let config = validate_configuration(input.a.clone(), input.b.clone())?;
    let p = svcore::period_matrix(&config, &input.forms, &input.chains, &opts.path_cfg())?;
    let mat = |m: &[Vec<Complex64>]| m.iter().map(|r| r.iter().map(|z| cjson(*z)).collect::<Vec<_>>()).collect::<Vec<_>>();
    rep.set("entries", mat(&p.entries));
    rep.set("abs_errors", &p.abs_errors);
    rep.set("row_labels", &p.row_labels);
    rep.set("col_labels", &p.col_labels);
    rep.abs_error = p.abs_errors.iter().flatten().fold(0.0, |a: f64, &b| a.max(b));
    if p.rows() == p.cols() && p.rows() > 0 {
        let s = sv_matrix(&p, &p.conj())?;
        rep.set("sv_matrix", mat(&s.entries));
        rep.set("involution_residual", s.checks.involution);
        rep.set("trace_integrality", s.checks.trace_integrality);
        rep.set("condition", s.checks.condition);
        rep.check(Check::new("S·S̄ = I", s.checks.s_sbar, tol));
    }
    Ok(rep)
}

// ---------------------------------------------------------------- fixtures

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    pub name: String,
    /// A number, `[re, im]`, or nested arrays of either.
    pub value: Value,
    pub tolerance: f64,
    pub source: String,
}

/// A golden regression case: a command, its inputs, and expected values
/// keyed like the report's `values`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub schema_version: String,
    pub name: String,
    pub command: String,
    pub inputs: Value,
    pub expected: Vec<Expected>,
}

fn flatten(v: &Value, out: &mut Vec<f64>) -> bool {
    match v {
        Value::Number(n) => {
            out.push(n.as_f64().unwrap_or(f64::NAN));
            true
        }
        // exact entries such as "-1/2"
        Value::String(t) => match crate::json::parse_rational(t).and_then(|q| q.to_f64()) {
            Some(x) => {
                out.push(x);
                true
            }
            None => false,
        },
        Value::Array(xs) => xs.iter().all(|x| flatten(x, out)),
        _ => false,
    }
}

/// Largest entrywise difference between two numeric JSON values of the same
/// shape.
pub fn numeric_distance(a: &Value, b: &Value) -> Option<f64> {
    let (mut x, mut y) = (Vec::new(), Vec::new());
    if !flatten(a, &mut x) || !flatten(b, &mut y) || x.len() != y.len() {
        return None;
    }
    Some(x.iter().zip(&y).fold(0.0, |m: f64, (p, q)| m.max((p - q).abs())))
}

pub fn dispatch(command: &str, inputs: Value, opts: &Options) -> Result<Report> {
    match command {
        "sv-log" => cmd_sv_log(&from_value(inputs, "sv-log inputs")?, opts),
        "double-copy" => cmd_double_copy(&parse_double_copy(inputs)?, opts),
        "sv-mzv" => cmd_sv_mzv(&from_value(inputs, "sv-mzv inputs")?, opts),
        "elliptic" => cmd_elliptic(&from_value(inputs, "elliptic inputs")?, opts),
        "height" => cmd_height(&from_value(inputs, "height inputs")?, opts),
        "period-matrix" => cmd_period_matrix(&from_value(inputs, "period-matrix inputs")?, opts),
        other => Err(Error::Input(format!("unknown command {other:?}"))),
    }
}

/// Runs a fixture and appends one check per expected value.
pub fn run_fixture(fx: &Fixture, opts: &Options) -> Result<Report> {
    if fx.schema_version != super::report::SCHEMA_VERSION {
        return Err(Error::Input(format!("fixture {} has schema version {}", fx.name, fx.schema_version)));
    }
    let mut rep = dispatch(&fx.command, fx.inputs.clone(), opts)?;
    for e in &fx.expected {
        let name = format!("fixture {}: {}", fx.name, e.name);
        let got = rep.values.get(&e.name).cloned().unwrap_or(Value::Null);
        rep.checks.push(match numeric_distance(&got, &e.value) {
            Some(d) => Check::new(name, d, e.tolerance).with_detail(format!("source: {}", e.source)),
            None => Check { name, residual: None, tolerance: e.tolerance, pass: false, detail: Some("value missing or of a different shape".into()) },
        });
    }
    Ok(rep)
}

pub fn load_fixture(path: &FsPath) -> Result<Fixture> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Input(format!("malformed fixture {}: {e}", path.display())))
}

/// `*.json` files in `dir`, sorted by name.
pub fn fixture_files(dir: &FsPath) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::Input(format!("cannot list {}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        let c = Complex64::new;
        for (s, z) in [
            ("2", c(2.0, 0.0)),
            ("-5", c(-5.0, 0.0)),
            ("i", c(0.0, 1.0)),
            ("-i", c(0.0, -1.0)),
            ("1+i", c(1.0, 1.0)),
            ("0.3-2.5i", c(0.3, -2.5)),
            ("1e-3+2e2i", c(1e-3, 200.0)),
            ("-1e-3-2E-2i", c(-1e-3, -0.02)),
            ("[1.5, -2]", c(1.5, -2.0)),
            (" 3 + 4i ", c(3.0, 4.0)),
        ] {
            assert_eq!(parse_complex(s).unwrap(), z, "{s}");
        }
        for s in ["", "x", "1+", "i1", "nan", "[1]"] {
            assert!(parse_complex(s).is_err(), "{s}");
        }
        assert_eq!(parse_count("2e6").unwrap(), 2_000_000);
        assert!(parse_count("2.5").is_err() && parse_count("0").is_err());
    }

    #[test]
    fn known_sv_mzv_values() {
        assert_eq!(sv_mzv_oracle(&[2]).unwrap(), Some(0.0));
        assert_eq!(sv_mzv_oracle(&[4]).unwrap(), Some(0.0));
        let z3 = sv_mzv_oracle(&[3]).unwrap().unwrap();
        assert!((z3 - 2.404_113_806_319_188_5).abs() < 1e-13);
        assert_eq!(sv_mzv_oracle(&[1, 2]).unwrap(), Some(z3));
        assert_eq!(sv_mzv_oracle(&[2, 3]).unwrap(), None);
    }

    #[test]
    fn numeric_distances() {
        assert_eq!(numeric_distance(&json!([1.0, 2.0]), &json!([1.5, 2.0])), Some(0.5));
        assert_eq!(numeric_distance(&json!(1.0), &json!([1.0, 0.0])), None);
        assert_eq!(numeric_distance(&json!([[1, 2], [3, 4]]), &json!([[1, 2], [3, 5]])), Some(1.0));
        assert_eq!(numeric_distance(&Value::Null, &json!(1)), None);
        assert_eq!(numeric_distance(&json!([["1", "-1/2"]]), &json!([[1, -0.5]])), Some(0.0));
        assert_eq!(numeric_distance(&json!("x"), &json!(1)), None);
    }

    #[test]
    fn real_locus() {
        let c = Complex64::new;
        assert!(on_real_locus(c(0.0, 1.0), c(1.0, 0.0)));
        assert!(on_real_locus(c(0.5, 0.9), c(0.0, 2.0)));
        assert!(!on_real_locus(c(0.3, 1.0), c(1.0, 0.0)));
        assert!(!on_real_locus(c(0.0, 1.0), c(1.0, 1.0)));
    }
}
