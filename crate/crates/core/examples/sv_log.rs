//! Single-valued logarithm as a sphere integral, next to 2 ln|a|.
//!
//!     cargo run --example sv_log -- 2 1+i -5

use num_complex::Complex64;
use svperiod::cli::parse_complex;
use svperiod::quad::QuadConfig;
use svperiod::svcore::sv_log;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let points: Vec<Complex64> = if args.is_empty() {
        vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.3, 0.0)]
    } else {
        args.iter().map(|s| parse_complex(s)).collect::<Result<_, _>>()?
    };
    let cfg = QuadConfig::sphere_default().with_rel_tol(1e-9);
    println!("{:>12} {:>20} {:>20} {:>10}", "a", "sphere integral", "2 ln|a|", "error est");
    for a in points {
        let r = sv_log(a, &cfg)?;
        println!("{:>12} {:>20.14} {:>20.14} {:>10.1e}", a.to_string(), r.estimate.value.re, r.direct, r.estimate.abs_error);
    }
    Ok(())
}
