//! Twenty-year run from the reference initial state.
//!
//! Writes `trajectory.csv` and `trajectory.svg` to `$SYNDEMIC_OUT_DIR` (or
//! `target/example-out`) and reports any invariant violations.

use std::path::Path;

use syndemic::dynamics::{invariant_monitor, simulate, uniform_grid};
use syndemic::model::{Compartment, Parameters, StateVector};
use syndemic::output::{resolve_out_dir, write_atomic};
use syndemic::svg::emit_svg;

fn main() -> syndemic::Result<()> {
    let p = Parameters::baseline(6.0, 0.1);
    let x0 = StateVector::reference_initial(50_000.0);
    let traj = simulate(&p, &x0, 20.0, Some(uniform_grid(20.0, 240)))?;

    println!("{:>5} {:>10} {:>10} {:>10} {:>10}", "t", "S", "I_T", "I_H", "N");
    for (t, s) in traj.times.iter().zip(&traj.states).step_by(24) {
        println!(
            "{t:>5.1} {:>10.2} {:>10.2} {:>10.2} {:>10.2}",
            s[Compartment::S],
            s[Compartment::IT],
            s[Compartment::IH],
            s.total()
        );
    }
    println!(
        "steps: {} accepted, {} rejected, {} rhs evaluations",
        traj.stats.accepted, traj.stats.rejected, traj.stats.rhs_evals
    );

    let violations = invariant_monitor(&traj, &p, 1e-6);
    println!("invariant violations: {}", violations.len());

    let dir = resolve_out_dir(Path::new("target/example-out"));
    write_atomic(&dir.join("trajectory.csv"), &traj.to_csv())?;
    write_atomic(&dir.join("trajectory.svg"), &emit_svg(&traj, &Compartment::ALL)?)?;
    println!("wrote {}", dir.display());
    Ok(())
}
