//! Archimedean height pairing of degree-zero divisors on the projective
//! line: sphere integral, Green's sum, and the principal divisor law.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use svperiod::geom::ProjPoint;
use svperiod::heights::{green_closed_form, height_pairing, principal_check, random_divisor_pair, DivisorDeg0, RationalFunction};
use svperiod::quad::QuadConfig;

fn main() -> svperiod::error::Result<()> {
    let cfg = QuadConfig::sphere_default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..4 {
        let (d, e) = random_divisor_pair(&mut rng);
        let h = height_pairing(&d, &e, &cfg)?;
        println!("D = {d}\nE = {e}");
        println!(
            "  ⟨D, E⟩ = {:+.10} ± {:.1e}, Green's sum {:+.10}\n",
            h.estimate.value.re,
            h.estimate.abs_error,
            green_closed_form(&d, &e)?
        );
    }

    let d = DivisorDeg0::from_ints(&[(1, ProjPoint::finite(0.0, 0.0)), (-1, ProjPoint::Infinity)])?;
    let f = RationalFunction {
        zeros: vec![(ProjPoint::finite(2.0, 1.0), 2)],
        poles: vec![(ProjPoint::finite(-1.0, 0.0), 1), (ProjPoint::finite(0.5, -2.0), 1)],
        leading: Complex64::new(3.0, 0.0),
    };
    let c = principal_check(&d, &f, &cfg)?;
    println!("D = {d}, div f = {}", f.divisor()?);
    println!("  ⟨D, div f⟩ = {:+.10}, log|f(0)|² − log|f(∞)|² = {:+.10}", c.pairing.estimate.value.re, c.predicted);
    Ok(())
}
