//! Line-oriented run configuration.
//!
//! ```text
//! # comment
//! beta1 = 6
//! beta2 = 0.1
//! incidence = total
//! init.S = 30000          # absolute counts, or
//! init.frac.S = 0.6       # fractions together with init.total
//! horizon = 20
//! ```
//!
//! Keys are case-sensitive. Parameter keys use the names in
//! [`Parameters::FIELD_NAMES`]; anything missing falls back to the bundled
//! [`DEFAULT_CONFIG`].

use std::collections::HashSet;
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::model::{validate_parameters, Compartment, Incidence, Parameters, StateVector, COMPARTMENTS};

/// Baseline rates, reference initial fractions and default options.
pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.cfg");

/// Allowed deviation of initial fractions from summing to one.
pub const FRACTION_SUM_TOL: f64 = 1e-9;

/// Population the `Λ/(Nμ)` prefactor of the reproduction numbers uses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NRef {
    /// `Λ/μ`.
    Dfe,
    /// Total of the initial condition.
    Initial,
    Value(f64),
}

impl NRef {
    pub fn resolve(self, params: &Parameters, initial: &StateVector) -> f64 {
        match self {
            NRef::Dfe => params.dfe_population(),
            NRef::Initial => initial.total(),
            NRef::Value(n) => n,
        }
    }
}

impl FromStr for NRef {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "dfe" => Ok(NRef::Dfe),
            "N0" => Ok(NRef::Initial),
            _ => match s.parse::<f64>() {
                Ok(n) if n.is_finite() && n > 0.0 => Ok(NRef::Value(n)),
                _ => Err(format!("expected `dfe`, `N0` or a positive number, got `{s}`")),
            },
        }
    }
}

impl fmt::Display for NRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NRef::Dfe => f.write_str("dfe"),
            NRef::Initial => f.write_str("N0"),
            NRef::Value(n) => write!(f, "{n}"),
        }
    }
}

pub fn parse_incidence(s: &str) -> std::result::Result<Incidence, String> {
    if s == "total" {
        return Ok(Incidence::Total);
    }
    match s.parse::<f64>() {
        Ok(n) if n.is_finite() && n > 0.0 => Ok(Incidence::Constant(n)),
        _ => Err(format!("expected `total` or a positive population, got `{s}`")),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialCondition {
    Counts([f64; COMPARTMENTS]),
    Fractions { fractions: [f64; COMPARTMENTS], total: f64 },
}

impl InitialCondition {
    pub fn state(&self) -> StateVector {
        match self {
            InitialCondition::Counts(c) => StateVector(*c),
            InitialCondition::Fractions { fractions, total } => StateVector::from_fractions(fractions, *total),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// All rates. `beta1`/`beta2` hold 0 until assigned; see
    /// [`RunConfig::parameters`].
    pub params: Parameters,
    pub beta1_set: bool,
    pub beta2_set: bool,
    pub initial: InitialCondition,
    pub horizon: f64,
    pub rel_tol: f64,
    /// `None` scales the absolute tolerance with the initial population.
    pub abs_tol: Option<f64>,
    pub nref: NRef,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        static DEFAULT: OnceLock<RunConfig> = OnceLock::new();
        DEFAULT
            .get_or_init(|| parse_onto(DEFAULT_CONFIG, None).expect("bundled default config is valid"))
            .clone()
    }
}

impl RunConfig {
    /// Parameters for a run; fails if either transmission coefficient was
    /// never assigned.
    pub fn parameters(&self) -> Result<Parameters> {
        let missing: Vec<String> = [("beta1", self.beta1_set), ("beta2", self.beta2_set)]
            .into_iter()
            .filter(|(_, set)| !set)
            .map(|(name, _)| format!("{name} must be set (no default)"))
            .collect();
        if !missing.is_empty() {
            return Err(Error::InvalidParameters(missing));
        }
        Ok(self.params.clone())
    }

    pub fn set_betas(&mut self, beta1: Option<f64>, beta2: Option<f64>) {
        if let Some(b) = beta1 {
            self.params.beta1 = b;
            self.beta1_set = true;
        }
        if let Some(b) = beta2 {
            self.params.beta2 = b;
            self.beta2_set = true;
        }
    }

    pub fn initial_state(&self) -> StateVector {
        self.initial.state()
    }

    /// Renders the configuration so that parsing the text gives back an
    /// equal value.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        for name in Parameters::FIELD_NAMES {
            if (name == "beta1" && !self.beta1_set) || (name == "beta2" && !self.beta2_set) {
                continue;
            }
            let _ = writeln!(s, "{name} = {}", self.params.get(name).expect("known field"));
        }
        let _ = writeln!(s, "incidence = {}", self.params.incidence);
        match &self.initial {
            InitialCondition::Counts(c) => {
                for (comp, v) in Compartment::ALL.iter().zip(c) {
                    let _ = writeln!(s, "init.{} = {v}", comp.label());
                }
            }
            InitialCondition::Fractions { fractions, total } => {
                let _ = writeln!(s, "init.total = {total}");
                for (comp, v) in Compartment::ALL.iter().zip(fractions) {
                    let _ = writeln!(s, "init.frac.{} = {v}", comp.label());
                }
            }
        }
        let _ = writeln!(s, "horizon = {}", self.horizon);
        let _ = writeln!(s, "rel_tol = {}", self.rel_tol);
        if let Some(a) = self.abs_tol {
            let _ = writeln!(s, "abs_tol = {a}");
        }
        let _ = writeln!(s, "nref = {}", self.nref);
        let _ = writeln!(s, "out = {}", self.out.display());
        s
    }
}

/// Parses `text` on top of the bundled defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_onto(text, Some(RunConfig::default()))
}

fn parse_onto(text: &str, base: Option<RunConfig>) -> Result<RunConfig> {
    let mut cfg = base.unwrap_or_else(|| RunConfig {
        params: Parameters::baseline(0.0, 0.0),
        beta1_set: false,
        beta2_set: false,
        initial: InitialCondition::Counts([0.0; COMPARTMENTS]),
        horizon: 20.0,
        rel_tol: 1e-8,
        abs_tol: None,
        nref: NRef::Dfe,
        out: PathBuf::from("out"),
    });

    let mut seen = HashSet::new();
    let mut counts: Option<[f64; COMPARTMENTS]> = None;
    let mut fractions: Option<[f64; COMPARTMENTS]> = None;
    let mut frac_seen = [false; COMPARTMENTS];
    let mut total: Option<f64> = None;
    let mut last_init_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: String| Error::Config { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
        if key.is_empty() {
            return Err(err("missing key".into()));
        }
        if !seen.insert(key.to_string()) {
            return Err(err(format!("duplicate key `{key}`")));
        }
        let number = || -> Result<f64> {
            value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(format!("malformed number `{value}` for `{key}`")))
        };

        if let Some(label) = key.strip_prefix("init.frac.") {
            let c = Compartment::from_label(label).ok_or_else(|| err(format!("unknown compartment `{label}`")))?;
            fractions.get_or_insert([0.0; COMPARTMENTS])[c.index()] = number()?;
            frac_seen[c.index()] = true;
            last_init_line = line;
        } else if key == "init.total" {
            total = Some(number()?);
            last_init_line = line;
        } else if let Some(label) = key.strip_prefix("init.") {
            let c = Compartment::from_label(label).ok_or_else(|| err(format!("unknown compartment `{label}`")))?;
            counts.get_or_insert([0.0; COMPARTMENTS])[c.index()] = number()?;
            last_init_line = line;
        } else if cfg.params.get(key).is_some() {
            let v = number()?;
            cfg.params.set(key, v)?;
            match key {
                "beta1" => cfg.beta1_set = true,
                "beta2" => cfg.beta2_set = true,
                _ => {}
            }
        } else {
            match key {
                "incidence" => cfg.params.incidence = parse_incidence(value).map_err(err)?,
                "horizon" => {
                    let v = number()?;
                    if v <= 0.0 {
                        return Err(err("horizon must be positive".into()));
                    }
                    cfg.horizon = v;
                }
                "rel_tol" | "abs_tol" => {
                    let v = number()?;
                    if v <= 0.0 {
                        return Err(err(format!("{key} must be positive")));
                    }
                    if key == "rel_tol" {
                        cfg.rel_tol = v;
                    } else {
                        cfg.abs_tol = Some(v);
                    }
                }
                "nref" => cfg.nref = value.parse().map_err(err)?,
                "out" => cfg.out = PathBuf::from(value),
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
    }

    let init_err = |message: String| Error::Config {
        line: last_init_line,
        message,
    };
    match (counts, fractions, total) {
        (None, None, None) => {}
        (Some(c), None, None) => {
            if c.iter().any(|&v| v < 0.0) {
                return Err(init_err("initial counts must be nonnegative".into()));
            }
            cfg.initial = InitialCondition::Counts(c);
        }
        (None, Some(f), Some(t)) => {
            if let Some(i) = frac_seen.iter().position(|s| !s) {
                return Err(init_err(format!("missing init.frac.{}", Compartment::ALL[i].label())));
            }
            if f.iter().any(|&v| v < 0.0) || t <= 0.0 {
                return Err(init_err("fractions must be nonnegative and init.total positive".into()));
            }
            let sum: f64 = f.iter().sum();
            if (sum - 1.0).abs() > FRACTION_SUM_TOL {
                return Err(init_err(format!("initial fractions sum to {sum}, expected 1")));
            }
            cfg.initial = InitialCondition::Fractions { fractions: f, total: t };
        }
        (None, Some(_), None) => return Err(init_err("init.frac.* requires init.total".into())),
        (None, None, Some(_)) => return Err(init_err("init.total requires init.frac.*".into())),
        (Some(_), ..) => {
            return Err(init_err(
                "give either init.<compartment> counts or fractions, not both".into(),
            ))
        }
    }

    let violations = validate_parameters(&cfg.params);
    if !violations.is_empty() {
        return Err(Error::InvalidParameters(
            violations.into_iter().map(|v| v.to_string()).collect(),
        ));
    }
    Ok(cfg)
}
