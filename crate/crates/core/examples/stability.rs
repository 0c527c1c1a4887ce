//! Linear stability at the disease-free and interior equilibria.

use syndemic::equilibria::syndemic;
use syndemic::model::{Parameters, StateVector};
use syndemic::stability::{dfe_trace_det, stability_report};

fn main() -> syndemic::Result<()> {
    for (b1, b2) in [(2.7, 0.03), (6.0, 0.1)] {
        let p = Parameters::baseline(b1, b2);
        let dfe = stability_report(&StateVector::disease_free(&p), &p)?;
        println!("β1 = {b1}, β2 = {b2}");
        println!(
            "  disease-free: {} (dominant real part {:.6})",
            dfe.classification, dfe.dominant_real
        );
        let td = dfe_trace_det(&p)?;
        println!(
            "  trace {:.6} (closed form {:.6}, without the β2 term {:.6}), det {:.3e}",
            td.trace_numeric, td.trace_closed, td.trace_without_hiv_gain, td.det
        );
        let eq = syndemic(&p, &StateVector::reference_initial(50_000.0))?;
        let rep = stability_report(&eq.state, &p)?;
        println!(
            "  {} equilibrium: {} (dominant real part {:.6})",
            eq.kind, rep.classification, rep.dominant_real
        );
        for z in &rep.eigenvalues {
            println!("    {:>12.6} {:+.6}i", z.re, z.im);
        }
    }
    Ok(())
}
