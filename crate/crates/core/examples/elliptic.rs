//! Periods and quasi-periods of the curve attached to `τ`, the Fricke
//! relation checked against the AGM, and the single-valued period matrix.

use num_complex::Complex64;
use svperiod::elliptic::{area_pairing, fricke_residual, g2star, sv_matrix_elliptic, TauPoint};

fn main() -> svperiod::error::Result<()> {
    let eps = 1e-15;
    for (tau, lambda) in [
        (Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)),
        (Complex64::new(0.5, 3f64.sqrt() / 2.0), Complex64::new(1.0, 0.0)),
        (Complex64::new(0.2, 1.4), Complex64::new(0.5, 0.5)),
    ] {
        let p = TauPoint::new(tau, lambda)?;
        let sv = sv_matrix_elliptic(&p, eps)?;
        let d = &sv.data;
        println!("τ = {tau:.6}, λ = {lambda}");
        println!("  ω₁ = {:.10}  ω₂ = {:.10}", d.omega1, d.omega2);
        println!("  η₁ = {:.10}  η₂ = {:.10}", d.eta1, d.eta2);
        println!("  y² = 4x³ − ({:.6})x − ({:.6})", d.u, d.v);
        println!("  G2* = {:.3e}, Fricke vs AGM {:.1e}", g2star(tau, eps)?, fricke_residual(&p, eps)?);
        for row in &sv.matrix.entries {
            println!("  S: {:>28} {:>28}", format!("{:.10}", row[0]), format!("{:.10}", row[1]));
        }
        println!("  tr S = {:.2e}, det S = {:.10}, ‖S² − I‖ = {:.1e}", sv.trace, sv.determinant, sv.matrix.checks.involution.unwrap_or(f64::NAN));
        println!("  area pairing {:.10}", area_pairing(&p)?.closed_form);
    }
    Ok(())
}
