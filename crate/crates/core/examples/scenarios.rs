//! Runs every reproduction scenario and prints its checks.
//!
//! ```text
//! cargo run --release --example scenarios [-- name ...]
//! ```

use syndemic::scenarios::{run, ScenarioName, ScenarioSpec};

fn main() -> syndemic::Result<()> {
    let names: Vec<ScenarioName> = match std::env::args().skip(1).collect::<Vec<_>>() {
        args if args.is_empty() => ScenarioName::ALL.to_vec(),
        args => args.iter().map(|a| a.parse()).collect::<Result<_, _>>()?,
    };
    for name in names {
        let result = run(&ScenarioSpec::new(name))?;
        println!(
            "== {name}: {}",
            if result.passed() {
                "all checks pass"
            } else {
                "some checks fail"
            }
        );
        for c in &result.checks {
            println!(
                "  [{:>4}] {:<45} {:<40} expected {:>14.6} actual {:>14.6}  {}",
                c.status(),
                c.variant,
                c.name,
                c.expected,
                c.actual,
                c.note
            );
        }
    }
    Ok(())
}
