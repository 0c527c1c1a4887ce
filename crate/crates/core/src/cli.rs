//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a scenario check fails or a numerical
//! routine gives up, 2 on bad input (flags, config, parameters).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{parse_config, parse_incidence, NRef, RunConfig};
use crate::dynamics::{simulate_with, uniform_grid, IntegratorOptions};
use crate::equilibria::{disease_free, hiv_free, syndemic, tb_free_numeric, EquilibriumReport};
use crate::error::{Error, Result};
use crate::model::{Compartment, Parameters, StateVector, COMPARTMENTS};
use crate::output::{fmt_num, resolve_out_dir, write_atomic};
use crate::reproduction::{ngm_decomposition, r0};
use crate::scenarios::{self, Deaths, ScenarioName, ScenarioSpec, SweepReport};
use crate::stability::{bifurcation_analysis, stability_report};
use crate::svg::emit_svg;

#[derive(Debug, Parser)]
#[command(name = "syndemic", version, about = "TB–HIV/AIDS coinfection model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// `key = value` configuration file; missing keys take baseline values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub beta1: Option<f64>,
    #[arg(long)]
    pub beta2: Option<f64>,
    /// Incidence denominator: `total` or a fixed population.
    #[arg(long, value_parser = parse_incidence)]
    pub incidence: Option<crate::model::Incidence>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Dfe,
    Tbfree,
    Hivfree,
    Syndemic,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ReportArg {
    /// R1, R2, R0 per value.
    Repro,
    /// Equilibrium reached from the initial state.
    Equilibrium,
    /// State at the end of the horizon.
    Terminal,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the model; writes trajectory CSV and an SVG plot.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        horizon: Option<f64>,
        /// Output directory (overridden by SYNDEMIC_OUT_DIR).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of report intervals.
        #[arg(long, default_value_t = 240)]
        points: usize,
    },
    /// Reproduction numbers and the next-generation-matrix cross-check.
    R0 {
        #[command(flatten)]
        model: ModelArgs,
        /// `dfe` (Λ/μ), `N0` (initial total) or a population.
        #[arg(long)]
        nref: Option<NRef>,
    },
    /// Equilibrium of the requested kind as a CSV row.
    Equilibrium {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum)]
        kind: KindArg,
    },
    /// Spectrum and classification of an equilibrium.
    Stability {
        #[command(flatten)]
        model: ModelArgs,
        /// `dfe`, `syndemic`, or a CSV file holding a state.
        #[arg(long, default_value = "dfe")]
        at: String,
        /// Centre-manifold quantities of the HIV-only sub-model at β2 = β*.
        #[arg(long)]
        bifurcation: bool,
    },
    /// Reproduce a published experiment and write its check summary.
    Scenario {
        #[arg(long)]
        name: ScenarioName,
        /// Disease-induced deaths; default depends on the scenario.
        #[arg(long)]
        deaths: Option<Deaths>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One-parameter sweep over any rate.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        param: String,
        /// Comma-separated list, or `start:stop:count`.
        #[arg(long)]
        values: String,
        #[arg(long, value_enum, default_value = "repro")]
        report: ReportArg,
        #[arg(long)]
        horizon: Option<f64>,
        /// Also write the table to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", p.display())))?;
            parse_config(&text)
        }
        None => Ok(RunConfig::default()),
    }
}

fn model_config(m: &ModelArgs) -> Result<(RunConfig, Parameters)> {
    let mut cfg = load_config(m.config.as_deref())?;
    cfg.set_betas(m.beta1, m.beta2);
    if let Some(inc) = m.incidence {
        cfg.params.incidence = inc;
    }
    let params = cfg.parameters()?;
    params.validate()?;
    Ok((cfg, params))
}

/// Parses `a,b,c` or `start:stop:count` (inclusive, evenly spaced).
pub fn parse_values(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("cannot parse values `{s}`"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        return match n {
            0 => Err(bad()),
            1 => Ok(vec![a]),
            _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
        };
    }
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(bad());
    }
    Ok(v)
}

/// Reads a state from a CSV file: the last non-empty line holding ten
/// numbers (a header line is allowed).
pub fn read_state_csv(path: &Path) -> Result<StateVector> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    let row = text
        .lines()
        .rev()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .ok_or_else(|| Error::InvalidArgument(format!("{} holds no state", path.display())))?;
    let values: Vec<f64> = row
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidArgument(format!("malformed state row `{row}`")))?;
    let values: [f64; COMPARTMENTS] = values
        .get(..COMPARTMENTS)
        .and_then(|s| s.try_into().ok())
        .ok_or_else(|| Error::InvalidArgument(format!("state row needs {COMPARTMENTS} values")))?;
    Ok(StateVector(values))
}

fn equilibrium_csv(rep: &EquilibriumReport) -> String {
    let mut s = String::from("kind");
    for c in Compartment::ALL {
        s.push(',');
        s.push_str(c.label());
    }
    s.push_str(",N,residual,exists\n");
    s.push_str(rep.kind.label());
    for v in rep.state.0 {
        s.push(',');
        s.push_str(&fmt_num(v));
    }
    s.push_str(&format!(
        ",{},{},{}\n",
        fmt_num(rep.state.total()),
        fmt_num(rep.residual),
        rep.exists
    ));
    s
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| fmt_num(*x)).collect();
    format!("({})", parts.join(", "))
}

/// Runs one command, writing normal output to `out`. Returns the exit code.
fn execute(cmd: Command, out: &mut dyn Write) -> Result<u8> {
    match cmd {
        Command::Simulate {
            model,
            horizon,
            out: dir,
            points,
        } => {
            let (cfg, params) = model_config(&model)?;
            let horizon = horizon.unwrap_or(cfg.horizon);
            if !(horizon > 0.0) || points == 0 {
                return Err(Error::InvalidArgument("horizon and points must be positive".into()));
            }
            let x0 = cfg.initial_state();
            let mut opts = IntegratorOptions::for_population(x0.total());
            opts.rel_tol = cfg.rel_tol;
            if let Some(a) = cfg.abs_tol {
                opts.abs_tol = a;
            }
            opts.report_times = Some(uniform_grid(horizon, points));
            let traj = simulate_with(&params, &x0, horizon, &opts)?;
            let dir = resolve_out_dir(dir.as_deref().unwrap_or(&cfg.out));
            let csv = dir.join("trajectory.csv");
            let svg = dir.join("trajectory.svg");
            write_atomic(&csv, &traj.to_csv())?;
            write_atomic(&svg, &emit_svg(&traj, &Compartment::ALL)?)?;
            writeln!(out, "N({}) = {}", fmt_num(horizon), fmt_num(traj.terminal().total()))?;
            writeln!(out, "wrote {}", csv.display())?;
            writeln!(out, "wrote {}", svg.display())?;
            Ok(0)
        }
        Command::R0 { model, nref } => {
            let (cfg, params) = model_config(&model)?;
            let nref = nref.unwrap_or(cfg.nref);
            let n = nref.resolve(&params, &cfg.initial_state());
            let r = r0(&params, n);
            let ngm = ngm_decomposition(&params.clone().with_incidence(crate::model::Incidence::Constant(n)))?;
            writeln!(out, "n_ref = {} ({nref})", fmt_num(n))?;
            writeln!(out, "R1 = {:.5}", r.r1)?;
            writeln!(out, "R2 = {:.5}", r.r2)?;
            writeln!(out, "R0 = {:.5}", r.r0)?;
            writeln!(
                out,
                "NGM spectral radius = {:.5} (|rho - R0| = {:.1e})",
                ngm.rho,
                (ngm.rho - r.r0).abs()
            )?;
            Ok(0)
        }
        Command::Equilibrium { model, kind } => {
            let (cfg, params) = model_config(&model)?;
            let rep = match kind {
                KindArg::Dfe => disease_free(&params),
                KindArg::Tbfree => tb_free_numeric(&params)?,
                KindArg::Hivfree => hiv_free(&params)?,
                KindArg::Syndemic => syndemic(&params, &cfg.initial_state())?,
            };
            write!(out, "{}", equilibrium_csv(&rep))?;
            Ok(0)
        }
        Command::Stability { model, at, bifurcation } => {
            if bifurcation {
                let mut cfg = load_config(model.config.as_deref())?;
                cfg.set_betas(model.beta1.or(Some(0.0)), model.beta2.or(Some(0.0)));
                let rep = bifurcation_analysis(&cfg.parameters()?)?;
                writeln!(out, "beta* = {}", fmt_num(rep.beta_star))?;
                writeln!(out, "a = {} (finite differences {})", fmt_num(rep.a), fmt_num(rep.a_fd))?;
                writeln!(out, "b = {} (finite differences {})", fmt_num(rep.b), fmt_num(rep.b_fd))?;
                writeln!(out, "w = {}", fmt_vec(rep.w.as_slice()))?;
                writeln!(out, "v = {}", fmt_vec(rep.v.as_slice()))?;
                writeln!(
                    out,
                    "{}",
                    if rep.a < 0.0 && rep.b > 0.0 {
                        "forward (transcritical) bifurcation"
                    } else if rep.a > 0.0 && rep.b > 0.0 {
                        "backward bifurcation"
                    } else {
                        "bifurcation direction undetermined"
                    }
                )?;
                return Ok(0);
            }
            let (cfg, params) = model_config(&model)?;
            let state = match at.as_str() {
                "dfe" => StateVector::disease_free(&params),
                "syndemic" => syndemic(&params, &cfg.initial_state())?.state,
                path => read_state_csv(Path::new(path))?,
            };
            let rep = stability_report(&state, &params)?;
            writeln!(out, "re,im")?;
            for z in &rep.eigenvalues {
                writeln!(out, "{},{}", fmt_num(z.re), fmt_num(z.im))?;
            }
            writeln!(out, "classification = {}", rep.classification)?;
            writeln!(out, "dominant real part = {}", fmt_num(rep.dominant_real))?;
            Ok(0)
        }
        Command::Scenario {
            name,
            deaths,
            config,
            out: dir,
        } => {
            let cfg = load_config(config.as_deref())?;
            let mut spec = ScenarioSpec::new(name);
            spec.base = cfg.params.clone();
            spec.initial = cfg.initial_state();
            if let Some(d) = deaths {
                spec.deaths = d;
            }
            let result = scenarios::run(&spec)?;
            let dir = resolve_out_dir(dir.as_deref().unwrap_or(&cfg.out));
            let written = result.write(&dir)?;
            if let Some(table) = &result.table {
                write!(out, "{}", table.to_csv())?;
                writeln!(out)?;
            }
            write!(out, "{}", result.summary_csv())?;
            for p in written {
                writeln!(out, "wrote {}", p.display())?;
            }
            let failed = result.failures().count();
            writeln!(out, "{name}: {} checks, {failed} failed", result.checks.len())?;
            Ok(if failed == 0 { 0 } else { 1 })
        }
        Command::Sweep {
            model,
            param,
            values,
            report,
            horizon,
            out: file,
        } => {
            let mut cfg = load_config(model.config.as_deref())?;
            // The swept parameter may be a transmission coefficient.
            let sweeps_beta = |b: &str| param == b;
            cfg.set_betas(
                model.beta1.or(sweeps_beta("beta1").then_some(0.0)),
                model.beta2.or(sweeps_beta("beta2").then_some(0.0)),
            );
            if let Some(inc) = model.incidence {
                cfg.params.incidence = inc;
            }
            let params = cfg.parameters()?;
            let values = parse_values(&values)?;
            let report = match report {
                ReportArg::Repro => SweepReport::Repro,
                ReportArg::Equilibrium => SweepReport::Equilibrium,
                ReportArg::Terminal => SweepReport::Terminal(horizon.unwrap_or(cfg.horizon)),
            };
            let table = scenarios::sweep(&params, &cfg.initial_state(), &param, &values, report)?;
            let csv = table.to_csv();
            write!(out, "{csv}")?;
            if let Some(f) = file {
                let path = match f.file_name() {
                    Some(name) if f.parent().is_none_or(|p| p.as_os_str().is_empty()) => {
                        resolve_out_dir(&cfg.out).join(name)
                    }
                    _ => f,
                };
                write_atomic(&path, &csv)?;
                writeln!(out, "wrote {}", path.display())?;
            }
            Ok(0)
        }
    }
}

fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Config { .. } | Error::InvalidParameters(_) | Error::InvalidArgument(_)
    )
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if is_input_error(&e) {
                2
            } else {
                1
            }
        }
    }
}

pub fn main() -> ExitCode {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    ExitCode::from(run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (u8, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("syndemic").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn r0_reports_both_conventions() {
        let (code, out, _) = call(&["r0", "--beta1", "6", "--beta2", "0.1", "--nref", "dfe"]);
        assert_eq!(code, 0);
        assert!(out.contains("R1 = 1.39239"), "{out}");
        assert!(out.contains("R2 = 1.83666"), "{out}");
        let (_, out, _) = call(&["r0", "--beta1", "6", "--beta2", "0.1", "--nref", "50000"]);
        assert!(out.contains("R2 = 1.83593"), "{out}");
    }

    #[test]
    fn dfe_row() {
        let (code, out, _) = call(&["equilibrium", "--kind", "dfe", "--beta1", "6", "--beta2", "0.1"]);
        assert_eq!(code, 0);
        let row = out.lines().nth(1).unwrap();
        assert!(
            row.starts_with("disease-free,49980,0,0,0,0,0,0,0,0,0,49980,0,"),
            "{row}"
        );
    }

    #[test]
    fn input_errors_exit_2() {
        assert_eq!(call(&["bogus"]).0, 2);
        assert_eq!(call(&["r0", "--beta1", "6"]).0, 2);
        assert_eq!(call(&["r0", "--beta1", "x", "--beta2", "1"]).0, 2);
        assert_eq!(call(&["scenario", "--name", "table9"]).0, 2);
        let (code, _, err) = call(&[
            "sweep", "--beta1", "6", "--beta2", "0.1", "--param", "gamma", "--values", "1",
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("gamma"));
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn values_syntax() {
        assert_eq!(parse_values("1, 2,3").unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(parse_values("0:1:5").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(parse_values("0:1").is_err());
        assert!(parse_values("a").is_err());
    }

    #[test]
    fn state_csv_with_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        fs::write(&path, "S,L_T,I_T,R_T,I_H,A,L_TH,I_TH,R_TH,A_T\n1,2,3,4,5,6,7,8,9,10\n").unwrap();
        assert_eq!(read_state_csv(&path).unwrap().total(), 55.0);
    }
}
