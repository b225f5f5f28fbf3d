//! Importance-sampled Monte Carlo for `∫_{ℂⁿ} ν ∧ ω̄`.
//!
//! Coordinates are drawn in order. Coordinate `i` comes from an equal-weight
//! mixture with one component per pole of the integrand in `tᵢ`: the
//! constants `a` of its factors `tᵢ − a`, extra centers from the config, and
//! each earlier coordinate `tⱼ` coupled to it by a factor `tᵢ − tⱼ`. In
//! `u = ln ρ`, `ρ` the distance to the component's center, the density is
//!
//! ```text
//! e^{(u − u_lo)/2}   below u_lo,   1   on [u_lo, u_hi],   e^{−(u − u_hi)/2}   above u_hi,
//! ```
//!
//! where `e^{u_lo}`, `e^{u_hi}` are the nearest and farthest other poles and
//! constants. In the plane that is `ρ^{-3/2}` at the center, log-uniform
//! across the range of scales set by the other points, and `ρ^{-5/2}` in the
//! tail. The log-uniform stretch is what follows nested regimes such as
//! `|t₁| ≫ |t₂| ≫ |t₃|`, where the integrand is scale invariant in one
//! coordinate over many decades.
//!
//! When every term has a pole in the last coordinate and the two forms share
//! no pole there, that coordinate is integrated exactly (conditional Monte
//! Carlo): with the rest fixed both forms are sums of simple fractions in
//! `t_n`, and `∫_ℂ g·h̄ dA` has a closed form in logarithms. This removes two
//! real dimensions and most of the variance.
//!
//! Chunk `k` draws from a ChaCha8 stream `k` under the given seed; chunks are
//! reduced in index order, so the result does not depend on thread count.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{with_thread_cap, Estimate, McConfig, Method};
use crate::error::{Error, Result};
use crate::forms::{LinFactor, LogFormN};

/// Slope of `ln(second moment)` against `ln(samples)` over chunk doublings
/// above which the integrand is reported as non-integrable. A finite
/// variance gives slope ≈ 0; weights with tail `P(|w| > W) ~ 1/W` (a
/// divergent integral) give slope ≈ 1.
const VARIANCE_GROWTH_LIMIT: f64 = 0.5;

struct Coord {
    fixed: Vec<Complex64>,
    coupled: Vec<usize>,
}

struct Proposal {
    coords: Vec<Coord>,
    constants: Vec<Complex64>,
}

impl Proposal {
    /// Proposal for the first `m` coordinates.
    fn new(nu: &LogFormN, omega: &LogFormN, m: usize, extra: &[Vec<Complex64>]) -> Self {
        let (ln, lo) = (nu.constant_loci(), omega.constant_loci());
        let mut coords: Vec<Coord> = (0..m)
            .map(|i| {
                let mut fixed: Vec<Complex64> = Vec::new();
                for a in ln[i].iter().chain(&lo[i]).chain(extra.get(i).into_iter().flatten()) {
                    if !fixed.contains(a) {
                        fixed.push(*a);
                    }
                }
                Coord { fixed, coupled: Vec::new() }
            })
            .collect();
        for (i, j) in nu.couplings().into_iter().chain(omega.couplings()) {
            if j < m && !coords[j].coupled.contains(&i) {
                coords[j].coupled.push(i);
            }
        }
        for c in &mut coords {
            if c.fixed.is_empty() && c.coupled.is_empty() {
                c.fixed.push(Complex64::new(0.0, 0.0));
            }
        }
        let mut constants: Vec<Complex64> = Vec::new();
        for c in coords.iter().map(|c| &c.fixed).chain(&ln).chain(&lo) {
            for a in c {
                if !constants.contains(a) {
                    constants.push(*a);
                }
            }
        }
        Proposal { coords, constants }
    }

    /// Components `(center, s_lo, s_hi)` for coordinate `i`: one per pole of
    /// the conditional integrand, spanning the distances to the other poles
    /// and to every constant.
    fn components(&self, i: usize, t: &[Complex64], out: &mut Vec<(Complex64, f64, f64)>) {
        out.clear();
        let c = &self.coords[i];
        let poles = c.fixed.iter().copied().chain(c.coupled.iter().map(|&j| t[j]));
        for (k, p) in poles.clone().enumerate() {
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            let others = poles.clone().enumerate().filter(|&(m, _)| m != k).map(|(_, q)| q);
            for q in others.chain(self.constants.iter().copied()) {
                let d = (q - p).norm();
                if d > 0.0 && d.is_finite() {
                    lo = lo.min(d);
                    hi = hi.max(d);
                }
            }
            if !lo.is_finite() {
                (lo, hi) = (1.0, 1.0);
            }
            out.push((p, lo, hi));
        }
    }

    /// Draws `t` and returns the joint proposal density at `t`.
    fn sample(&self, rng: &mut ChaCha8Rng, t: &mut [Complex64], comps: &mut Vec<(Complex64, f64, f64)>) -> f64 {
        let mut q = 1.0;
        for i in 0..self.coords.len() {
            self.components(i, t, comps);
            let k = (rng.next_u64() % comps.len() as u64) as usize;
            let (center, lo, hi) = comps[k];
            let rho = Plateau::new(lo, hi).sample(open01(rng));
            let theta = 2.0 * PI * open01(rng);
            t[i] = center + Complex64::from_polar(rho, theta);
            let qi: f64 = comps.iter().map(|&(a, lo, hi)| Plateau::new(lo, hi).planar_density((t[i] - a).norm())).sum();
            q *= qi / comps.len() as f64;
        }
        q
    }
}

/// Radial law, in `u = ln ρ`, with density `e^{a(u−u_lo)}` below `u_lo`,
/// 1 on `[u_lo, u_hi]` and `e^{−b(u−u_hi)}` above.
struct Plateau {
    u_lo: f64,
    u_hi: f64,
    a: f64,
    b: f64,
}

impl Plateau {
    fn new(lo: f64, hi: f64) -> Self {
        Plateau { u_lo: lo.ln(), u_hi: hi.ln(), a: 0.5, b: 0.5 }
    }

    fn mass(&self) -> f64 {
        1.0 / self.a + (self.u_hi - self.u_lo) + 1.0 / self.b
    }

    fn sample(&self, x: f64) -> f64 {
        let x = x * self.mass();
        let l = self.u_hi - self.u_lo;
        let u = if x < 1.0 / self.a {
            self.u_lo + (self.a * x).ln() / self.a
        } else if x < 1.0 / self.a + l {
            self.u_lo + (x - 1.0 / self.a)
        } else {
            let y = x - 1.0 / self.a - l;
            self.u_hi - (1.0 - self.b * y).max(f64::MIN_POSITIVE).ln() / self.b
        };
        u.exp()
    }

    fn planar_density(&self, rho: f64) -> f64 {
        let u = rho.ln();
        let h = if u < self.u_lo {
            (self.a * (u - self.u_lo)).exp()
        } else if u <= self.u_hi {
            1.0
        } else {
            (-self.b * (u - self.u_hi)).exp()
        };
        h / (self.mass() * 2.0 * PI * rho * rho)
    }
}

/// Uniform on the open interval (0, 1).
fn open01(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Clone, Copy)]
struct ChunkStats {
    count: u64,
    sum: Complex64,
    sum_sq: f64,
}

/// Partial fractions of a form in its last coordinate, the others fixed:
/// appends `(residue, pole)` pairs to `out`.
fn slice(form: &LogFormN, t: &[Complex64], out: &mut Vec<(Complex64, Complex64)>) {
    let last = t.len() - 1;
    let mut poles: Vec<Complex64> = Vec::new();
    for term in form.terms() {
        poles.clear();
        let mut coef = term.scalar;
        for f in &term.factors {
            match *f {
                LinFactor::CoordMinusConst { i, a } if i == last => poles.push(a),
                LinFactor::CoordMinusCoord { i, j } if i == last => poles.push(t[j]),
                LinFactor::CoordMinusCoord { i, j } if j == last => {
                    coef = -coef;
                    poles.push(t[i]);
                }
                _ => coef /= f.eval(t),
            }
        }
        for (k, &p) in poles.iter().enumerate() {
            let mut r = coef;
            for (m, &q) in poles.iter().enumerate() {
                if m != k {
                    r /= p - q;
                }
            }
            out.push((r, p));
        }
    }
}

/// Whether the last coordinate can be integrated in closed form: every
/// term has a pole in it, the two forms share no pole locus there, and at
/// most one of them has a residue at infinity.
fn last_coordinate_is_exact(nu: &LogFormN, omega: &LogFormN) -> bool {
    let n = nu.dim();
    if n < 2 {
        return false;
    }
    let last = n - 1;
    let loci = |f: &LogFormN| -> Option<(Vec<LinFactor>, bool)> {
        let mut v = Vec::new();
        let mut simple = false;
        for term in f.terms() {
            let hits: Vec<LinFactor> = term
                .factors
                .iter()
                .filter(|f| match **f {
                    LinFactor::CoordMinusConst { i, .. } => i == last,
                    LinFactor::CoordMinusCoord { i, j } => i == last || j == last,
                })
                .copied()
                .collect();
            if hits.is_empty() {
                return None;
            }
            simple |= hits.len() == 1;
            v.extend(hits);
        }
        Some((v, simple))
    };
    match (loci(nu), loci(omega)) {
        (Some((a, sa)), Some((b, sb))) => !(sa && sb) && a.iter().all(|f| !b.contains(f)),
        _ => false,
    }
}

fn run_chunk(prop: &Proposal, nu: &LogFormN, omega: &LogFormN, exact_last: bool, seed: u64, index: usize, count: u64) -> ChunkStats {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let mut t = vec![Complex64::new(0.0, 0.0); nu.dim()];
    let mut comps = Vec::new();
    let (mut sn, mut so) = (Vec::new(), Vec::new());
    let mut sum = Complex64::new(0.0, 0.0);
    let mut sum_sq = 0.0;
    for _ in 0..count {
        let q = prop.sample(&mut rng, &mut t, &mut comps);
        let f = if exact_last {
            // ∫_ℂ g·h̄ dA = −π Σ cᵢ d̄ⱼ ln|aᵢ − bⱼ|² for g = Σ cᵢ/(t − aᵢ), h = Σ dⱼ/(t − bⱼ)
            sn.clear();
            so.clear();
            slice(nu, &t, &mut sn);
            slice(omega, &t, &mut so);
            let mut acc = Complex64::new(0.0, 0.0);
            for &(c, a) in &sn {
                for &(d, b) in &so {
                    acc += c * d.conj() * (a - b).norm_sqr().ln();
                }
            }
            acc * -PI
        } else {
            nu.eval_raw(&t) * omega.eval_raw(&t).conj()
        };
        let w = f / q;
        // a draw landing exactly on a singular locus has probability zero
        if w.is_finite() {
            sum += w;
            sum_sq += w.norm_sqr();
        }
    }
    ChunkStats { count, sum, sum_sq }
}

fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    match v.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

fn variance_growth(stats: &[ChunkStats]) -> f64 {
    let mut pts = Vec::new();
    let (mut n, mut sq) = (0u64, 0.0);
    for (k, s) in stats.iter().enumerate() {
        n += s.count;
        sq += s.sum_sq;
        if ((k + 1).is_power_of_two() || k + 1 == stats.len())
            && sq > 0.0 {
                pts.push(((n as f64).ln(), (sq / n as f64).ln()));
            }
    }
    if pts.len() < 3 {
        return 0.0;
    }
    let m = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / m, pts.iter().map(|p| p.1).sum::<f64>() / m);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Per-run diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct McDiagnostics {
    /// Chunk means of the (unnormalised) importance weights.
    #[serde(skip)]
    pub chunk_means: Vec<Complex64>,
    /// Least-squares slope of `ln m₂` against `ln N` over prefixes of
    /// 1, 2, 4, … chunks, where `m₂` is the mean squared weight.
    pub variance_growth: f64,
    /// `max |chunk mean − mean| / (stderr·√chunks)`.
    pub chunk_spread: f64,
}

/// Unbiased estimate of `∫_{ℂⁿ} ν ∧ ω̄`, with chunked standard error.
pub fn integrate_mc(nu: &LogFormN, omega: &LogFormN, mcfg: &McConfig) -> Result<Estimate> {
    integrate_mc_diagnostics(nu, omega, mcfg).map(|(e, _)| e)
}

/// As [`integrate_mc`], also returning chunk diagnostics.
pub fn integrate_mc_diagnostics(nu: &LogFormN, omega: &LogFormN, mcfg: &McConfig) -> Result<(Estimate, McDiagnostics)> {
    mcfg.validate()?;
    let n = nu.dim();
    if n == 0 || omega.dim() != n {
        return Err(Error::DimensionMismatch(format!("forms of dimension {} and {}", n, omega.dim())));
    }
    let exact_last = last_coordinate_is_exact(nu, omega);
    let prop = Proposal::new(nu, omega, if exact_last { n - 1 } else { n }, &mcfg.proposal_centers);
    let chunks = mcfg.chunks;
    let base = mcfg.samples / chunks as u64;
    let extra = mcfg.samples % chunks as u64;
    let stats: Vec<ChunkStats> = with_thread_cap(|| {
        (0..chunks)
            .into_par_iter()
            .map(|k| run_chunk(&prop, nu, omega, exact_last, mcfg.seed, k, base + u64::from((k as u64) < extra)))
            .collect()
    });

    let total: u64 = stats.iter().map(|s| s.count).sum();
    let mean = pairwise_sum(&stats.iter().map(|s| s.sum).collect::<Vec<_>>()) / total as f64;
    let means: Vec<Complex64> = stats.iter().map(|s| s.sum / s.count as f64).collect();
    let c = chunks as f64;
    let var_of_means = means.iter().map(|m| (m - mean).norm_sqr()).sum::<f64>() / (c - 1.0);
    let stderr = (var_of_means / c).sqrt();

    let growth = variance_growth(&stats);
    let spread = if stderr > 0.0 {
        means.iter().map(|m| (m - mean).norm()).fold(0.0, f64::max) / (stderr * c.sqrt())
    } else {
        0.0
    };
    if !mean.is_finite() || growth > VARIANCE_GROWTH_LIMIT {
        return Err(Error::NonIntegrableDetected { ratio: growth });
    }

    // dt₁…dt_n ∧ dt̄₁…dt̄_n = (−1)^{n(n−1)/2} Π (dtᵢ∧dt̄ᵢ) = (−1)^{n(n−1)/2} (−2i)ⁿ dA
    let mut k = Complex64::new(0.0, -2.0).powi(n as i32);
    if (n * (n - 1) / 2) % 2 == 1 {
        k = -k;
    }
    k *= nu.twist_factor() * omega.twist_factor().conj();
    let est = Estimate { value: mean * k, abs_error: stderr * k.norm(), samples_or_evals: total, method: Method::MonteCarlo };
    Ok((est, McDiagnostics { chunk_means: means, variance_growth: growth, chunk_spread: spread }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::LogForm1;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn plateau_density_integrates_to_one_and_inverts() {
        for (lo, hi) in [(1.0, 1.0), (0.01, 30.0)] {
            let p = Plateau::new(lo, hi);
            // ∫ 2πρ² q(ρ) du over u = ln ρ
            let (u0, u1, n) = (-60.0, 60.0, 400_000);
            let h = (u1 - u0) / n as f64;
            let acc: f64 = (0..n)
                .map(|k| {
                    let rho = (u0 + (k as f64 + 0.5) * h).exp();
                    2.0 * PI * rho * rho * p.planar_density(rho) * h
                })
                .sum();
            assert!((acc - 1.0).abs() < 1e-4, "{acc}");
            // CDF inversion is monotone and hits the plateau edges
            assert!((p.sample(2.0 / p.mass()) - lo).abs() < 1e-12 * lo.max(1.0));
            assert!((p.sample((2.0 + (hi / lo).ln()) / p.mass()) - hi).abs() < 1e-9 * hi);
        }
    }

    #[test]
    fn slice_partial_fractions_match_evaluation() {
        let nu = crate::forms::mzv_nu(3).unwrap();
        let t = [c(0.3, 0.2), c(-1.1, 0.5), c(2.0, -0.7)];
        let mut out = Vec::new();
        slice(&nu, &t, &mut out);
        let direct = nu.eval_raw(&t);
        let pf: Complex64 = out.iter().map(|&(r, p)| r / (t[2] - p)).sum();
        assert!((direct - pf).norm() < 1e-12 * direct.norm());
        assert!(last_coordinate_is_exact(&nu, &crate::forms::mzv_omega(&[3]).unwrap()));
        assert!(!last_coordinate_is_exact(&nu, &nu));
    }

    #[test]
    fn deterministic_and_thread_independent() {
        let nu = LogFormN::from_form1(&LogForm1::dlog_ratio(crate::geom::ProjPoint::finite(2.0, 0.0), crate::geom::ProjPoint::finite(1.0, 0.0)).unwrap());
        let om = LogFormN::from_form1(&LogForm1::dz_over(c(0.0, 0.0)));
        let cfg = McConfig { samples: 20000, seed: 9, chunks: 8, proposal_centers: vec![] };
        let a = integrate_mc(&nu, &om, &cfg).unwrap();
        let b = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| integrate_mc(&nu, &om, &cfg).unwrap());
        assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
        assert_eq!(a.value.im.to_bits(), b.value.im.to_bits());
        assert_eq!(a.abs_error.to_bits(), b.abs_error.to_bits());
    }

    #[test]
    fn one_dimensional_matches_closed_form() {
        let nu_1 = LogForm1::new([(c(1.0, 0.0), crate::geom::ProjPoint::finite(0.0, 0.0)), (c(-1.0, 0.0), crate::geom::ProjPoint::finite(1.0, 0.0))]).unwrap();
        let om_1 = LogForm1::dz_over(c(-1.0, 0.0));
        let exact = crate::quad::sphere_pairing_closed_form(&nu_1, &om_1).unwrap();
        let nu = LogFormN::from_form1(&nu_1);
        let om = LogFormN::from_form1(&om_1);
        let (e, d) = integrate_mc_diagnostics(&nu, &om, &McConfig { samples: 400_000, seed: 3, chunks: 32, proposal_centers: vec![] }).unwrap();
        assert!(e.brackets(exact, 4.0), "{e:?} vs {exact}");
        assert!(d.chunk_spread <= 6.0);
        assert!(d.variance_growth.abs() < 0.3, "{d:?}");
    }

    #[test]
    fn shared_pole_is_flagged() {
        // 1/(t(1−t)) against 1/(t−1): |t−1|^{-2} near 1 is not integrable
        let nu = crate::forms::mzv_nu(1).unwrap();
        let om = LogFormN::monomial(1, c(1.0, 0.0), vec![crate::forms::LinFactor::coord_minus_const(0, 1.0)]).unwrap();
        let r = integrate_mc(&nu, &om, &McConfig { samples: 400_000, seed: 5, chunks: 32, proposal_centers: vec![] });
        assert!(matches!(r, Err(Error::NonIntegrableDetected { .. })), "{r:?}");
    }

    #[test]
    fn config_checks() {
        let f = crate::forms::mzv_nu(1).unwrap();
        assert!(integrate_mc(&f, &f, &McConfig { samples: 1, seed: 0, chunks: 2, proposal_centers: vec![] }).is_err());
        assert!(integrate_mc(&f, &crate::forms::mzv_nu(2).unwrap(), &McConfig::new(100, 0)).is_err());
    }
}
