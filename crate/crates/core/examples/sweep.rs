//! One-parameter sweeps: reproduction numbers over `β2`, and the interior
//! equilibrium over the TB treatment rate `τ2`.

use syndemic::model::{Parameters, StateVector};
use syndemic::scenarios::{sweep, SweepReport};

fn main() -> syndemic::Result<()> {
    let x0 = StateVector::reference_initial(50_000.0);
    let base = Parameters::baseline(6.0, 0.1);

    let betas: Vec<f64> = (0..=10).map(|i| 0.01 * i as f64).collect();
    print!("{}", sweep(&base, &x0, "beta2", &betas, SweepReport::Repro)?.to_csv());
    println!();

    let table = sweep(&base, &x0, "tau2", &[0.5, 1.0, 2.0, 4.0], SweepReport::Equilibrium)?;
    let it = table.header.iter().position(|h| h == "I_T").expect("column");
    let n = table.header.iter().position(|h| h == "N").expect("column");
    for row in &table.rows {
        println!(
            "tau2 = {:<4} R1 = {:.4}  I_T* = {:>9.3}  N* = {:>9.2}",
            row[0], row[1], row[it], row[n]
        );
    }
    Ok(())
}
