//! Double copy formula on the logarithm family: the sphere integral of
//! `ν ∧ ω̄` against the sum of products of path integrals weighted by the
//! inverse intersection matrix.

use num_complex::Complex64;
use svperiod::quad::QuadConfig;
use svperiod::svcore::{double_copy_check, log_family};

fn main() -> svperiod::error::Result<()> {
    let a = std::env::args().nth(1).map_or(Ok(Complex64::new(2.0, 0.0)), |s| svperiod::cli::parse_complex(&s))?;
    let fam = log_family(a)?;
    println!("ν = {}\nω = {}", fam.nu, fam.omega);
    for (k, g) in fam.gammas.iter().enumerate() {
        println!("γ{k} = {g}");
    }
    for (k, d) in fam.deltas.iter().enumerate() {
        println!("δ{k} = {d}");
    }
    let r = double_copy_check(&fam.nu, &fam.omega, &fam.gammas, &fam.deltas, &QuadConfig::sphere_default())?;
    println!("intersection matrix ⟨γᵢ, δⱼ⟩:\n{}", r.intersection_matrix);
    for t in &r.rhs_terms {
        println!(
            "  term ({}, {}): coefficient {}, ∫γ ν = {:.10}, ∫δ̄ ω = {:.10}",
            t.i, t.j, t.coefficient, t.period1.value, t.period2.value
        );
    }
    println!("lhs = {:.10} ± {:.1e}", r.lhs.value, r.lhs.abs_error);
    println!("rhs = {:.10}", r.rhs);
    println!("2πi ln|a|² = {:.10}", Complex64::new(0.0, 2.0 * std::f64::consts::PI * a.norm_sqr().ln()));
    println!("residual {:.2e}, combined error {:.2e}", r.residual, r.combined_error());
    Ok(())
}
