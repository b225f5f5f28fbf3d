//! Command-line front end. Every subcommand produces a [`Report`]; `--json`
//! prints it, otherwise a short text summary goes to stdout.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 domain error, 3 input
//! error; `selftest` exits with the number of failed checks (at most 125).

pub mod commands;
pub mod report;
pub mod selftest;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

pub use commands::{
    cmd_double_copy, cmd_elliptic, cmd_height, cmd_period_matrix, cmd_sv_log, cmd_sv_mzv, dispatch, fixture_files,
    load_fixture, numeric_distance, parse_complex, parse_count, run_fixture, DoubleCopyInput, EllipticInput, Expected,
    Fixture, HeightInput, Options, PeriodMatrixInput, SvLogInput, SvMzvInput,
};
pub use report::{Check, ErrorInfo, Report, SCHEMA_VERSION};
pub use selftest::{cmd_selftest, Level};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "svperiod", version, about = "Single-valued periods: numerical integrals on the Riemann sphere and their checks")]
pub struct Cli {
    #[command(flatten)]
    pub flags: Flags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Flags {
    /// Check tolerance (each command has its own default).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Maximum number of adaptive subdivisions.
    #[arg(long, global = true)]
    pub max_subdiv: Option<usize>,
    /// Monte Carlo sample count, e.g. 2e6.
    #[arg(long, global = true, value_parser = count)]
    pub samples: Option<u64>,
    /// Monte Carlo chunk count.
    #[arg(long, global = true)]
    pub chunks: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Print the JSON report on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    /// Directory of fixture files; also searched for relative input paths.
    #[arg(long, global = true)]
    pub fixtures: Option<PathBuf>,
}

fn count(s: &str) -> std::result::Result<u64, String> {
    parse_count(s).map_err(|e| e.to_string())
}

fn complex(s: &str) -> std::result::Result<Complex64, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single-valued logarithm of `a`, against 2 ln|a|.
    SvLog {
        #[arg(long, allow_hyphen_values = true, value_parser = complex)]
        a: Complex64,
    },
    /// Double copy formula for a configuration (file or inline JSON), or for
    /// the logarithm family at each `--a`.
    DoubleCopy {
        config: Option<String>,
        #[arg(long, allow_hyphen_values = true, value_parser = complex)]
        a: Vec<Complex64>,
    },
    /// Single-valued multiple zeta value by Monte Carlo.
    SvMzv {
        #[arg(required = true)]
        indices: Vec<u32>,
    },
    /// Periods, quasi-periods and single-valued period matrix at `τ`.
    Elliptic {
        #[arg(long, allow_hyphen_values = true, value_parser = complex)]
        tau: Complex64,
        #[arg(long, allow_hyphen_values = true, value_parser = complex, default_value = "1")]
        lambda: Complex64,
        /// Truncation bound for the q-series.
        #[arg(long, default_value_t = 1e-15)]
        eps: f64,
    },
    /// Archimedean height pairing of two degree-zero divisors.
    Height {
        d: String,
        e: String,
        /// Rational function for the principal divisor law.
        #[arg(long)]
        f: Option<String>,
    },
    /// Period matrix of forms against chains, with its single-valued matrix.
    PeriodMatrix { spec: String },
    /// Runs a fixture file.
    Fixture { path: String },
    /// Built-in checks; with `--fixtures DIR`, every fixture there too.
    Selftest {
        #[arg(value_enum, default_value = "fast")]
        level: Level,
    },
}

impl Flags {
    fn options(&self) -> Options {
        Options {
            tol: self.tol,
            max_subdiv: self.max_subdiv,
            samples: self.samples,
            chunks: self.chunks,
            seed: self.seed,
            fixtures: self.fixtures.clone(),
        }
    }
}

fn fixture_path(opts: &Options, path: &str) -> PathBuf {
    let p = PathBuf::from(path);
    match &opts.fixtures {
        Some(dir) if !p.exists() => dir.join(p),
        _ => p,
    }
}

/// Appends every fixture in `dir` to a selftest report.
fn run_fixture_dir(rep: &mut Report, dir: &std::path::Path, opts: &Options) -> Result<()> {
    for path in fixture_files(dir)? {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        match load_fixture(&path).and_then(|fx| run_fixture(&fx, opts)) {
            Ok(r) => rep.checks.extend(r.checks.into_iter().map(|mut c| {
                c.name = format!("{name}: {}", c.name);
                c
            })),
            Err(e) => rep.check(Check::failed(name, 0.0, &e)),
        }
    }
    Ok(())
}

/// A fixture file given where plain inputs are expected is run as the
/// fixture, provided it is for the same command.
fn as_fixture(v: serde_json::Value, command: &str) -> Result<std::result::Result<Fixture, serde_json::Value>> {
    if v.get("expected").is_none() || v.get("schema_version").is_none() {
        return Ok(Err(v));
    }
    let fx: Fixture = commands::from_value(v, "fixture")?;
    if fx.command != command {
        return Err(Error::Input(format!("fixture {} is for {}, not {command}", fx.name, fx.command)));
    }
    Ok(Ok(fx))
}

pub fn execute(cmd: &Command, opts: &Options) -> Result<Report> {
    match cmd {
        Command::SvLog { a } => cmd_sv_log(&SvLogInput { a: *a }, opts),
        Command::DoubleCopy { config, a } => {
            if config.is_some() && !a.is_empty() {
                return Err(Error::Input("give either a configuration or --a, not both".into()));
            }
            match config {
                Some(c) => match as_fixture(opts.read_json(c)?, "double-copy")? {
                    Ok(fx) => run_fixture(&fx, opts),
                    Err(v) => cmd_double_copy(&commands::parse_double_copy(v)?, opts),
                },
                None => cmd_double_copy(&DoubleCopyInput::LogFamily { a: a.clone() }, opts),
            }
        }
        Command::SvMzv { indices } => cmd_sv_mzv(&SvMzvInput { indices: indices.clone() }, opts),
        Command::Elliptic { tau, lambda, eps } => cmd_elliptic(&EllipticInput { tau: *tau, lambda: *lambda, eps: *eps }, opts),
        Command::Height { d, e, f } => {
            let input = HeightInput {
                d: commands::from_value(opts.read_json(d)?, "divisor")?,
                e: commands::from_value(opts.read_json(e)?, "divisor")?,
                f: f.as_deref().map(|f| opts.read_json(f).and_then(|v| commands::from_value(v, "rational function"))).transpose()?,
            };
            cmd_height(&input, opts)
        }
        Command::PeriodMatrix { spec } => match as_fixture(opts.read_json(spec)?, "period-matrix")? {
            Ok(fx) => run_fixture(&fx, opts),
            Err(v) => cmd_period_matrix(&commands::from_value(v, "period-matrix spec")?, opts),
        },
        Command::Fixture { path } => run_fixture(&load_fixture(&fixture_path(opts, path))?, opts),
        Command::Selftest { level } => {
            let mut rep = cmd_selftest(*level, opts)?;
            if let Some(dir) = &opts.fixtures {
                run_fixture_dir(&mut rep, dir, opts)?;
            }
            Ok(rep)
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::SvLog { .. } => "sv-log",
        Command::DoubleCopy { .. } => "double-copy",
        Command::SvMzv { .. } => "sv-mzv",
        Command::Elliptic { .. } => "elliptic",
        Command::Height { .. } => "height",
        Command::PeriodMatrix { .. } => "period-matrix",
        Command::Fixture { .. } => "fixture",
        Command::Selftest { .. } => "selftest",
    }
}

pub fn exit_code(rep: &Report, selftest: bool) -> i32 {
    if let Some(e) = &rep.error {
        return if e.kind == "input" { 3 } else { 2 };
    }
    let failed = rep.failures();
    if selftest {
        failed.min(125) as i32
    } else {
        i32::from(failed > 0)
    }
}

fn print_text(rep: &Report) {
    println!("{}", rep.command);
    if let serde_json::Value::Object(m) = &rep.values {
        for (k, v) in m {
            println!("  {k} = {v}");
        }
    }
    for c in &rep.checks {
        let r = c.residual.map_or("n/a".to_string(), |r| format!("{r:.3e}"));
        println!("  [{}] {}: residual {r} (tol {:.3e})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.tolerance);
        if let (false, Some(d)) = (c.pass, &c.detail) {
            println!("         {d}");
        }
    }
    println!("  {} of {} checks passed, {} ms", rep.checks.len() - rep.failures(), rep.checks.len(), rep.wall_time_ms);
}

/// Parses arguments, runs the command, prints, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let opts = cli.flags.options();
    let start = Instant::now();
    let result = crate::quad::with_thread_cap(|| execute(&cli.command, &opts));
    let mut rep = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            let mut r = Report::new(command_name(&cli.command), serde_json::Value::Null, opts.seed());
            r.error = Some(ErrorInfo::from(&e));
            r
        }
    };
    rep.wall_time_ms = start.elapsed().as_millis() as u64;
    if cli.flags.json {
        // a closed pipe is not worth a panic
        let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(&rep).expect("reports serialize"));
    } else if rep.error.is_none() {
        print_text(&rep);
    }
    exit_code(&rep, matches!(cli.command, Command::Selftest { .. }))
}
