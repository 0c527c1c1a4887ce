//! Centre-manifold analysis of the HIV-only sub-model at `β2 = β*`.
//!
//! `a < 0` and `b > 0` mean the endemic branch leaves the disease-free state
//! forwards: no endemic state below the threshold.

use syndemic::model::Parameters;
use syndemic::stability::bifurcation_analysis;

fn main() -> syndemic::Result<()> {
    let rep = bifurcation_analysis(&Parameters::baseline(0.0, 0.0))?;
    println!("β* = {:.12}", rep.beta_star);
    println!(
        "eigenvalues at β*: {:?}",
        rep.eigenvalues.iter().map(|z| z.re).collect::<Vec<_>>()
    );
    println!("right null vector w = {:.6?}", rep.w.as_slice());
    println!("  closed form       = {:.6?}", rep.w_formula.as_slice());
    println!("left null vector  v = {:.6?}", rep.v.as_slice());
    println!("  closed form       = {:.6?}", rep.v_formula.as_slice());
    println!(
        "a = {:.6e} (finite differences {:.6e}, simplified expression {:.6e})",
        rep.a, rep.a_fd, rep.a_simplified
    );
    println!(
        "b = {:.6e} (finite differences {:.6e}, simplified expression {:.6e})",
        rep.b, rep.b_fd, rep.b_simplified
    );
    println!(
        "{}",
        if rep.a < 0.0 && rep.b > 0.0 {
            "forward bifurcation"
        } else {
            "not a forward bifurcation"
        }
    );
    Ok(())
}
