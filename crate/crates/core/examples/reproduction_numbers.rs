//! Reproduction numbers for the baseline rates.
//!
//! The `Λ/(Nμ)` prefactor depends on which population `N` stands for; the
//! two natural choices (the disease-free total `Λ/μ` and the initial 50 000)
//! differ by 0.04 %, which is visible at five decimals.

use syndemic::model::{Incidence, Parameters, REFERENCE_POPULATION};
use syndemic::reproduction::{ngm_decomposition, r0};

fn main() -> syndemic::Result<()> {
    let p = Parameters::baseline(6.0, 0.1);
    for (label, n) in [("Λ/μ", p.dfe_population()), ("N(0)", REFERENCE_POPULATION)] {
        let r = r0(&p, n);
        let ngm = ngm_decomposition(&p.clone().with_incidence(Incidence::Constant(n)))?;
        println!(
            "N = {label:<5} ({n:>8.2}): R1 = {:.5}  R2 = {:.5}  R0 = {:.5}  ρ(FV⁻¹) = {:.5}",
            r.r1, r.r2, r.r0, ngm.rho
        );
    }

    println!("\nthreshold scan in β1 (β2 = 0):");
    for b1 in [2.0, 4.0, 4.3, 4.31, 6.0] {
        let q = p.clone().with_betas(b1, 0.0);
        println!("  β1 = {b1:<5} R1 = {:.5}", r0(&q, q.dfe_population()).r1);
    }
    Ok(())
}
