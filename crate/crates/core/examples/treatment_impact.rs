//! Treated vs untreated arms over 20 years with `β1 = 13`, `β2 = 0.06`.
//!
//! Each family zeroes a set of treatment rates in its untreated arm; the
//! minimal and the broader reading are both run.

use syndemic::model::{Parameters, StateVector};
use syndemic::scenarios::{run_treatment_impact, Deaths, TreatmentFamily};

fn main() -> syndemic::Result<()> {
    let base = Parameters::baseline(0.0, 0.0);
    let x0 = StateVector::reference_initial(50_000.0);
    for family in [TreatmentFamily::Tb, TreatmentFamily::Aids, TreatmentFamily::Coinfection] {
        for deaths in [Deaths::On, Deaths::Off] {
            let res = run_treatment_impact(&base, &x0, family, deaths)?;
            println!("{family:?}, disease deaths {deaths}:");
            for v in &res.variants {
                let t = v.trajectory.as_ref().expect("trajectory");
                let last = t.terminal();
                println!(
                    "  {:<48} N(20) = {:>9.2}  I_TH(20) = {:>8.2}  R_TH(20) = {:>8.2}",
                    v.name,
                    last.total(),
                    last.0[7],
                    last.0[8]
                );
            }
            for c in res.checks.iter().filter(|c| c.name != "N(20)") {
                println!(
                    "  [{}] {} {}: {:.4} (expected {:.4}) {}",
                    c.status(),
                    c.variant,
                    c.name,
                    c.actual,
                    c.expected,
                    c.note
                );
            }
        }
    }
    Ok(())
}
