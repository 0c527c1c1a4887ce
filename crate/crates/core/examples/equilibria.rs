//! The four equilibrium families.

use syndemic::equilibria::{disease_free, hiv_free, syndemic, tb_free_closed, tb_free_numeric, EquilibriumReport};
use syndemic::model::{Compartment, Incidence, Parameters, StateVector};

fn show(label: &str, rep: &EquilibriumReport) {
    let values: Vec<String> = Compartment::ALL
        .iter()
        .map(|&c| format!("{}={:.2}", c.label(), rep.state[c]))
        .collect();
    println!(
        "{label:<9} [{}] exists={} residual={:.1e} R0={:.4}\n          {}",
        rep.kind,
        rep.exists,
        rep.residual,
        rep.repro.r0,
        values.join(" ")
    );
}

fn main() -> syndemic::Result<()> {
    let p = Parameters::baseline(6.0, 0.1);
    show("DFE", &disease_free(&p));

    // Single-disease states use N = Λ/μ in the incidence.
    let n = p.dfe_population();
    let fixed = p.clone().with_incidence(Incidence::Constant(n));
    show("HIV-free", &hiv_free(&fixed.clone().with_betas(6.0, 0.0))?);
    show("TB-free", &tb_free_numeric(&fixed.clone().with_betas(0.0, 0.09))?);

    let closed = tb_free_closed(&p.clone().with_betas(0.0, 0.09), n);
    println!(
        "          closed form: I_H={:.5} A={:.5} R2={:.5}",
        closed.i_h, closed.a, closed.r2
    );

    // With N the instantaneous total, HIV deaths shrink the population and
    // the same β2 gives a much larger prevalence.
    let total = p.clone().with_betas(0.0, 0.09).with_incidence(Incidence::Total);
    show("TB-free*", &tb_free_numeric(&total)?);

    show("interior", &syndemic(&p, &StateVector::reference_initial(50_000.0))?);
    Ok(())
}
