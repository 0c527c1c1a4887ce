//! Sign check of the nonlinear remainder `Ĝ(X, Z)` of the infected
//! subsystem. The global-stability argument needs `Ĝ ≥ 0`; components that
//! are negative at a state are listed by position.

use syndemic::model::{Parameters, StateVector};
use syndemic::stability::h2_condition_check;

fn main() -> syndemic::Result<()> {
    let p = Parameters::baseline(6.0, 0.1);
    let states = [
        ("disease-free", StateVector::disease_free(&p)),
        ("reference initial", StateVector::reference_initial(50_000.0)),
    ];
    for (label, x) in states {
        let h = h2_condition_check(&x, &p)?;
        println!("{label}: holds = {}, negative components {:?}", h.holds(), h.violating);
        println!("  Ĝ = {:.3?}", h.ghat);
    }
    Ok(())
}
