//! Parsing a run configuration on top of the bundled defaults.

use syndemic::config::{parse_config, DEFAULT_CONFIG};

fn main() -> syndemic::Result<()> {
    let text = "\
# TB-treatment experiment
beta1 = 13
beta2 = 0.06
incidence = total
horizon = 20
nref = N0
";
    let cfg = parse_config(text)?;
    let p = cfg.parameters()?;
    println!(
        "beta1 = {}, beta2 = {}, k2 = {}, incidence = {}",
        p.beta1, p.beta2, p.k2, p.incidence
    );
    println!("initial total = {}", cfg.initial_state().total());
    println!("\nserialised:\n{}", cfg.to_config_string());
    assert_eq!(parse_config(&cfg.to_config_string())?, cfg);

    match parse_config("beta1 = 6\nmu = 0\n") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    match parse_config("beta1 = 6\nbeta3 = 1\n") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    println!("\nbundled defaults: {} lines", DEFAULT_CONFIG.lines().count());
    Ok(())
}
