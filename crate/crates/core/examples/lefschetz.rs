//! Cauchy–Stokes pairing of `dz/z` with the radial test function
//! `|z|²/(1+|z|²)`: the Lefschetz period, −1.

use num_complex::Complex64;
use svperiod::forms::LogForm1;
use svperiod::quad::{cauchy_stokes_pairing, QuadConfig, RadialRational};

fn main() -> svperiod::error::Result<()> {
    let omega = LogForm1::dz_over(Complex64::new(0.0, 0.0));
    for tol in [1e-4, 1e-7, 1e-10] {
        let cfg = QuadConfig::sphere_default().with_rel_tol(tol);
        let (e, predicted) = cauchy_stokes_pairing(&omega, &RadialRational::lefschetz(), &cfg)?;
        println!(
            "rel_tol {tol:.0e}: {:+.14} (residues predict {:+}), error est {:.1e}, {} evaluations",
            e.value.re, predicted.re, e.abs_error, e.samples_or_evals
        );
    }
    Ok(())
}
