//! Single-valued multiple zeta values by Monte Carlo over `ℂⁿ`, and a
//! classical series for `ζ(n₁, …, n_r)` used as the oracle.
//!
//! Convention: `ζ(n₁, …, n_r) = Σ_{0<k₁<⋯<k_r} k₁^{−n₁}⋯k_r^{−n_r}`,
//! convergent for `n_r ≥ 2`, equal to the iterated integral over
//! `0 < t₁ < ⋯ < t_n < 1` of `(−1)^r Π dtₖ/(tₖ − eₖ)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{mzv_nu, mzv_omega};
use crate::quad::{integrate_mc_diagnostics, Estimate, McConfig};

/// Global sign relating the standard orientation of `ℂⁿ` (that of
/// `Π dxᵢ∧dyᵢ`) to the normalisation of the integral formula for `ζ^sv`:
/// with `ν`, `ω` and the prefactor `(−1)^{n(n−1)/2}(2πi)^{−n}` taken
/// literally, the weight-3 integral comes out as `−2ζ(3)`. The sign is
/// calibrated on that value, where `ζ^sv(3) = 2ζ(3)` is classical.
pub const MZV_ORIENTATION_SIGN: f64 = -1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvMzv {
    pub indices: Vec<u32>,
    /// Real part of the estimate, with its standard error.
    pub estimate: Estimate,
    /// Imaginary part, which should vanish within a few standard errors.
    pub imaginary_part: f64,
    pub variance_growth: f64,
    pub chunk_spread: f64,
}

/// `ζ^sv(n₁, …, n_r) = ± (2πi)^{−n} ∫_{ℂⁿ} ν_n ∧ ω̄_{n₁…n_r}`.
pub fn sv_mzv(indices: &[u32], mcfg: &McConfig) -> Result<SvMzv> {
    let omega = mzv_omega(indices)?;
    let n = omega.dim();
    let nu = mzv_nu(n)?;
    let (raw, diag) = integrate_mc_diagnostics(&nu, &omega, mcfg)?;
    let mut k = Complex64::new(0.0, 2.0 * PI).powi(-(n as i32)) * MZV_ORIENTATION_SIGN;
    if (n * (n - 1) / 2) % 2 == 1 {
        k = -k;
    }
    let z = raw.scaled(k);
    Ok(SvMzv {
        indices: indices.to_vec(),
        estimate: Estimate { value: Complex64::new(z.value.re, 0.0), ..z },
        imaginary_part: z.value.im,
        variance_growth: diag.variance_growth,
        chunk_spread: diag.chunk_spread,
    })
}

fn check_indices(indices: &[u32]) -> Result<()> {
    match indices.last() {
        Some(&l) if l >= 2 && indices.iter().all(|&m| m >= 1) => Ok(()),
        _ => Err(Error::DivergentIndex(indices.to_vec())),
    }
}

/// Truncated nested sum over `k_r ≤ terms`; no tail correction.
pub fn mzv_nested_sum(indices: &[u32], terms: usize) -> Result<f64> {
    check_indices(indices)?;
    // level[k] = Σ over chains ending at k of the partial product
    let mut level = vec![1.0; terms + 1];
    level[0] = 0.0;
    let mut first = true;
    for &m in indices {
        let mut next = vec![0.0; terms + 1];
        let mut below = 0.0;
        for k in 1..=terms {
            let inner = if first { 1.0 } else { below };
            next[k] = inner / (k as f64).powi(m as i32);
            below += level[k];
        }
        level = next;
        first = false;
    }
    Ok(level.iter().rev().sum())
}

#[derive(Clone, Copy, PartialEq)]
enum Letter {
    /// `dt/t`
    A,
    /// `dt/(1 − t)`
    B,
}

/// Power-series coefficients in `x` of `∫_{0<t₁<⋯<t_k<x}` of the letters,
/// innermost first, truncated at degree `order`.
fn iterated_series(word: &[Letter], order: usize) -> Vec<f64> {
    let mut f = vec![0.0; order + 1];
    f[0] = 1.0;
    for l in word {
        let mut g = vec![0.0; order + 1];
        match l {
            Letter::B => {
                let mut partial = 0.0;
                for k in 0..order {
                    partial += f[k];
                    g[k + 1] = partial / (k + 1) as f64;
                }
            }
            Letter::A => {
                for k in 1..=order {
                    g[k] = f[k] / k as f64;
                }
            }
        }
        f = g;
    }
    f
}

fn at_half(word: &[Letter], order: usize) -> f64 {
    iterated_series(word, order).iter().rev().fold(0.0, |acc, c| acc * 0.5 + c)
}

fn series_value(word: &[Letter], order: usize) -> f64 {
    // split the path at ½; the piece from ½ to 1 becomes one from 0 to ½
    // under t ↦ 1 − t, which reverses the word and swaps the letters
    let w = word.len();
    (0..=w)
        .map(|j| {
            let tail: Vec<Letter> =
                word[j..].iter().rev().map(|l| if *l == Letter::A { Letter::B } else { Letter::A }).collect();
            at_half(&word[..j], order) * at_half(&tail, order)
        })
        .sum()
}

/// `ζ(n₁, …, n_r)` to about 1e-13, starting from `terms` series
/// coefficients and doubling until successive values agree.
pub fn mzv_series(indices: &[u32], terms: usize) -> Result<f64> {
    check_indices(indices)?;
    let mut word = Vec::new();
    for &m in indices {
        word.push(Letter::B);
        word.extend(std::iter::repeat_n(Letter::A, m as usize - 1));
    }
    let mut order = terms.max(16);
    let mut prev = series_value(&word, order);
    loop {
        order *= 2;
        let cur = series_value(&word, order);
        if (cur - prev).abs() <= 1e-14 * cur.abs().max(1.0) || order > 1 << 14 {
            return Ok(cur);
        }
        prev = cur;
    }
}
