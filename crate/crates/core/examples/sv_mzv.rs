//! Single-valued multiple zeta values by Monte Carlo, with the classical
//! series values they are built from.
//!
//!     cargo run --release --example sv_mzv -- 1e6 3

use svperiod::cli::parse_count;
use svperiod::quad::McConfig;
use svperiod::svcore::{mzv_series, sv_mzv};

fn main() -> svperiod::error::Result<()> {
    let mut args = std::env::args().skip(1);
    let samples = args.next().map_or(Ok(1_000_000), |s| parse_count(&s))?;
    let seed = args.next().map_or(1, |s| s.parse().unwrap_or(1));
    for idx in [vec![2u32], vec![3], vec![1, 2]] {
        println!("ζ{idx:?} = {:.12}", mzv_series(&idx, 20)?);
    }
    let z3 = mzv_series(&[3], 20)?;
    for (idx, expected) in [(vec![2u32], 0.0), (vec![3], 2.0 * z3), (vec![1, 2], 2.0 * z3)] {
        let r = sv_mzv(&idx, &McConfig::new(samples, seed))?;
        println!(
            "ζsv{idx:?} ≈ {:+.4} ± {:.4}  (expected {expected:.4}; Im {:+.1e}, variance growth {:.2})",
            r.estimate.value.re, r.estimate.abs_error, r.imaginary_part, r.variance_growth
        );
    }
    Ok(())
}
