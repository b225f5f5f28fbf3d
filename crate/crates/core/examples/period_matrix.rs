//! Period matrix of the logarithm family, its single-valued matrix
//! `S = P̄⁻¹P`, and the exact intersection/duality data behind the basis.

use num_complex::Complex64;
use svperiod::geom::{dual_pairing_matrix, intersection_number, RationalMatrix};
use svperiod::quad::QuadConfig;
use svperiod::svcore::{log_family, period_matrix, sv_matrix};

fn show(name: &str, m: &[Vec<Complex64>]) {
    println!("{name}:");
    for row in m {
        let cells: Vec<String> = row.iter().map(|z| format!("{:>24}", format!("{:.8}", z))).collect();
        println!("  {}", cells.join(" "));
    }
}

fn main() -> svperiod::error::Result<()> {
    let a = Complex64::new(3.0, 1.0);
    let fam = log_family(a)?;
    let p = period_matrix(&fam.config, &fam.forms, &fam.chains, &QuadConfig::path_default())?;
    println!("rows {:?}, columns {:?}", p.row_labels, p.col_labels);
    show("P", &p.entries);
    let s = sv_matrix(&p, &p.conj())?;
    show("S", &s.entries);
    println!("ln|a|² = {:.8}", a.norm_sqr().ln());
    println!("checks: {:?}", s.checks);

    let rows = fam
        .gammas
        .iter()
        .map(|g| fam.deltas.iter().map(|d| intersection_number(g, d)).collect())
        .collect::<svperiod::error::Result<Vec<_>>>()?;
    let m = RationalMatrix::from_rows(rows)?;
    let dual = dual_pairing_matrix(&m)?;
    println!("intersections M:\n{m}\ndual pairing (Mᵀ)⁻¹:\n{dual}");
    println!("dualᵀ·M = I exactly: {}", &dual.transpose() * &m == RationalMatrix::identity(m.rows()));
    Ok(())
}
