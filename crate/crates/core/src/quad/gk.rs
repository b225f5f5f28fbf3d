//! Gauss–Kronrod (7, 15) rules and global adaptive drivers in one and two
//! dimensions. Error estimates are the raw `|K − G|` difference, which is
//! pessimistic for smooth integrands but never optimistic in practice.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// The 15 nodes on `[−1, 1]` with Kronrod and (zero-padded) Gauss weights.
pub(crate) fn rule15() -> [(f64, f64, f64); 15] {
    let mut out = [(0.0, 0.0, 0.0); 15];
    for k in 0..7 {
        let wg = if k % 2 == 1 { WG[k / 2] } else { 0.0 };
        out[k] = (-XGK[k], WGK[k], wg);
        out[14 - k] = (XGK[k], WGK[k], wg);
    }
    out[7] = (0.0, WGK[7], WG[3]);
    out
}

#[derive(Debug, Clone, Copy)]
pub struct RuleResult {
    pub kronrod: Complex64,
    pub gauss: Complex64,
    /// Kronrod estimate of `∫|f|`, used to scale tolerances.
    pub abs: f64,
}

impl RuleResult {
    pub fn error(&self) -> f64 {
        (self.kronrod - self.gauss).norm()
    }
}

pub fn gk15(mut f: impl FnMut(f64) -> Complex64, a: f64, b: f64) -> RuleResult {
    gk15_with_abs(
        |x| {
            let v = f(x);
            (v, v.norm())
        },
        a,
        b,
    )
}

/// As [`gk15`], for integrands that report their own magnitude (e.g. an
/// inner integral of `|f|` when the inner integral of `f` cancels).
pub fn gk15_with_abs(mut f: impl FnMut(f64) -> (Complex64, f64), a: f64, b: f64) -> RuleResult {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = Complex64::new(0.0, 0.0);
    let mut g = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    for (x, wk, wg) in rule15() {
        let (v, m) = f(c + h * x);
        k += v * wk;
        g += v * wg;
        abs += m * wk;
    }
    RuleResult { kronrod: k * h, gauss: g * h, abs: abs * h.abs() }
}

#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub value: Complex64,
    pub error: f64,
    pub abs: f64,
    pub evals: u64,
}

struct Item<R> {
    err: f64,
    region: R,
    res: RuleResult,
}

impl<R> PartialEq for Item<R> {
    fn eq(&self, o: &Self) -> bool {
        self.err.total_cmp(&o.err) == Ordering::Equal
    }
}
impl<R> Eq for Item<R> {}
impl<R> PartialOrd for Item<R> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<R> Ord for Item<R> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Tolerance target: relative to the integral, with a floor relative to
/// `∫|f|` so that integrals that cancel to zero still terminate.
pub(crate) fn target(value: Complex64, abs: f64, rel_tol: f64, abs_tol: f64) -> f64 {
    abs_tol.max(rel_tol * value.norm().max(1e-2 * abs)).max(1e-14 * abs)
}

/// Global adaptive subdivision: always bisect the region with the largest
/// error until the summed error meets the target.
fn drive<R: Clone>(
    initial: Vec<R>,
    mut rule: impl FnMut(&R) -> RuleResult,
    split: impl Fn(&R) -> Vec<R>,
    evals_per_rule: u64,
    rel_tol: f64,
    abs_tol: f64,
    max_subdiv: usize,
) -> Result<Adaptive> {
    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    for r in initial {
        let res = rule(&r);
        evals += evals_per_rule;
        heap.push(Item { err: res.error(), region: r, res });
    }
    let mut splits = 0;
    loop {
        // resum each round: keeps the totals free of drift
        let (mut value, mut error, mut abs) = (Complex64::new(0.0, 0.0), 0.0, 0.0);
        for it in heap.iter() {
            value += it.res.kronrod;
            error += it.err;
            abs += it.res.abs;
        }
        if !(error.is_finite() && value.is_finite()) {
            return Err(Error::NonConvergent { subdivisions: splits, error });
        }
        if error <= target(value, abs, rel_tol, abs_tol) {
            return Ok(Adaptive { value, error, abs, evals });
        }
        if splits >= max_subdiv {
            return Err(Error::NonConvergent { subdivisions: splits, error });
        }
        let worst = heap.pop().expect("nonempty");
        for r in split(&worst.region) {
            let res = rule(&r);
            evals += evals_per_rule;
            heap.push(Item { err: res.error(), region: r, res });
        }
        splits += 1;
    }
}

/// Adaptive integral of `f` over consecutive intervals `breaks[k]..breaks[k+1]`.
pub fn adaptive_1d(
    mut f: impl FnMut(f64) -> Complex64,
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_subdiv: usize,
) -> Result<Adaptive> {
    adaptive_1d_with_abs(
        |x| {
            let v = f(x);
            (v, v.norm())
        },
        breaks,
        rel_tol,
        abs_tol,
        max_subdiv,
    )
}

/// [`adaptive_1d`] with a caller-supplied magnitude for the tolerance floor.
pub fn adaptive_1d_with_abs(
    mut f: impl FnMut(f64) -> (Complex64, f64),
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_subdiv: usize,
) -> Result<Adaptive> {
    let initial: Vec<(f64, f64)> = breaks.windows(2).map(|w| (w[0], w[1])).collect();
    drive(
        initial,
        |&(a, b)| gk15_with_abs(&mut f, a, b),
        |&(a, b)| {
            let m = 0.5 * (a + b);
            vec![(a, m), (m, b)]
        },
        15,
        rel_tol,
        abs_tol,
        max_subdiv,
    )
}

pub type Rect = (f64, f64, f64, f64);

/// Tensor-product (7, 15) rule on `[x0, x1] × [y0, y1]`.
pub fn gk15_2d(mut f: impl FnMut(f64, f64) -> Complex64, r: &Rect) -> RuleResult {
    let (x0, x1, y0, y1) = *r;
    let (cx, hx) = (0.5 * (x0 + x1), 0.5 * (x1 - x0));
    let (cy, hy) = (0.5 * (y0 + y1), 0.5 * (y1 - y0));
    let nodes = rule15();
    let mut k = Complex64::new(0.0, 0.0);
    let mut g = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    for &(u, wku, wgu) in &nodes {
        let x = cx + hx * u;
        for &(v, wkv, wgv) in &nodes {
            let val = f(x, cy + hy * v);
            k += val * (wku * wkv);
            if wgu != 0.0 && wgv != 0.0 {
                g += val * (wgu * wgv);
            }
            abs += val.norm() * wku * wkv;
        }
    }
    let area = hx * hy;
    RuleResult { kronrod: k * area, gauss: g * area, abs: abs * area.abs() }
}

/// Adaptive cubature over a union of rectangles, splitting into quarters.
pub fn adaptive_2d(
    mut f: impl FnMut(f64, f64) -> Complex64,
    rects: Vec<Rect>,
    rel_tol: f64,
    abs_tol: f64,
    max_subdiv: usize,
) -> Result<Adaptive> {
    drive(
        rects,
        |r| gk15_2d(&mut f, r),
        |&(x0, x1, y0, y1)| {
            let (xm, ym) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
            vec![(x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1)]
        },
        225,
        rel_tol,
        abs_tol,
        max_subdiv,
    )
}
