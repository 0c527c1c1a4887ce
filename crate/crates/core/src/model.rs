//! Compartments, parameters and right-hand sides of the TB-HIV/AIDS model.
//!
//! The population is split into ten classes, always ordered as
//! `S, L_T, I_T, R_T, I_H, A, L_TH, I_TH, R_TH, A_T`. Every vector, Jacobian
//! and CSV column in this crate uses that ordering.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

pub const COMPARTMENTS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Compartment {
    S,
    LT,
    IT,
    RT,
    IH,
    A,
    LTH,
    ITH,
    RTH,
    AT,
}

impl Compartment {
    pub const ALL: [Compartment; COMPARTMENTS] = [
        Compartment::S,
        Compartment::LT,
        Compartment::IT,
        Compartment::RT,
        Compartment::IH,
        Compartment::A,
        Compartment::LTH,
        Compartment::ITH,
        Compartment::RTH,
        Compartment::AT,
    ];

    /// The eight classes carrying TB and/or HIV infection. `S` and `R_T` are
    /// the uninfected classes.
    pub const INFECTED: [Compartment; 8] = [
        Compartment::LT,
        Compartment::IT,
        Compartment::IH,
        Compartment::A,
        Compartment::LTH,
        Compartment::ITH,
        Compartment::RTH,
        Compartment::AT,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Compartment::S => "S",
            Compartment::LT => "L_T",
            Compartment::IT => "I_T",
            Compartment::RT => "R_T",
            Compartment::IH => "I_H",
            Compartment::A => "A",
            Compartment::LTH => "L_TH",
            Compartment::ITH => "I_TH",
            Compartment::RTH => "R_TH",
            Compartment::AT => "A_T",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.label() == label)
    }
}

impl fmt::Display for Compartment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Denominator used in the standard-incidence forces of infection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Incidence {
    /// `N` is the instantaneous sum of all compartments.
    Total,
    /// `N` is a fixed population scale.
    Constant(f64),
}

impl Incidence {
    pub fn denominator(self, total: f64) -> f64 {
        match self {
            Incidence::Total => total,
            Incidence::Constant(n) => n,
        }
    }

    /// Value of `N` at the disease-free equilibrium, i.e. the population the
    /// `Λ/(Nμ)` prefactor of the reproduction numbers refers to.
    pub fn reference_population(self, params: &Parameters) -> f64 {
        match self {
            Incidence::Total => params.dfe_population(),
            Incidence::Constant(n) => n,
        }
    }
}

impl fmt::Display for Incidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Incidence::Total => f.write_str("total"),
            Incidence::Constant(n) => write!(f, "{n}"),
        }
    }
}

/// Rate constants (1/year unless noted) and modification factors.
#[derive(Clone, Debug, PartialEq)]
pub struct Parameters {
    /// Recruitment rate, people/year.
    pub lambda: f64,
    pub mu: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Partial immunity of TB-recovered individuals, `≤ 1`.
    pub beta1p: f64,
    /// TB reinfection modifier for `R_TH`, `≥ 1`.
    pub beta2p: f64,
    pub k1: f64,
    pub k2: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub tau3: f64,
    pub tau4: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub rho3: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub psi: f64,
    pub delta: f64,
    pub eta: f64,
    pub d_t: f64,
    pub d_a: f64,
    pub d_ta: f64,
    pub incidence: Incidence,
}

/// Population scale of the reference initial condition.
pub const REFERENCE_POPULATION: f64 = 50_000.0;

impl Parameters {
    /// Config/CLI names of the numeric fields, in declaration order.
    pub const FIELD_NAMES: [&'static str; 23] = [
        "Lambda", "mu", "beta1", "beta2", "beta1p", "beta2p", "k1", "k2", "tau1", "tau2", "tau3", "tau4", "rho1",
        "rho2", "rho3", "alpha1", "alpha2", "psi", "delta", "eta", "dT", "dA", "dTA",
    ];

    /// Baseline rates with the two transmission coefficients supplied.
    /// Incidence uses the constant scale `N = 50000`.
    pub fn baseline(beta1: f64, beta2: f64) -> Self {
        let k1 = 1.0;
        Parameters {
            lambda: 714.0,
            mu: 1.0 / 70.0,
            beta1,
            beta2,
            beta1p: 0.9,
            beta2p: 1.1,
            k1,
            k2: 1.3 * k1,
            tau1: 1.0,
            tau2: 2.0,
            tau3: 2.0,
            tau4: 1.0,
            rho1: 0.1,
            rho2: 0.25,
            rho3: 0.125,
            alpha1: 0.33,
            alpha2: 0.33,
            psi: 1.07,
            delta: 1.03,
            eta: 1.02,
            d_t: 1.0 / 8.0,
            d_a: 0.3,
            d_ta: 0.33,
            incidence: Incidence::Constant(REFERENCE_POPULATION),
        }
    }

    pub fn with_incidence(mut self, incidence: Incidence) -> Self {
        self.incidence = incidence;
        self
    }

    pub fn with_betas(mut self, beta1: f64, beta2: f64) -> Self {
        self.beta1 = beta1;
        self.beta2 = beta2;
        self
    }

    /// Sets `dT = dA = dTA = 0`.
    pub fn without_disease_deaths(mut self) -> Self {
        self.d_t = 0.0;
        self.d_a = 0.0;
        self.d_ta = 0.0;
        self
    }

    /// `Λ/μ`, the total population at the disease-free equilibrium.
    pub fn dfe_population(&self) -> f64 {
        self.lambda / self.mu
    }

    fn field_mut(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "Lambda" => &mut self.lambda,
            "mu" => &mut self.mu,
            "beta1" => &mut self.beta1,
            "beta2" => &mut self.beta2,
            "beta1p" => &mut self.beta1p,
            "beta2p" => &mut self.beta2p,
            "k1" => &mut self.k1,
            "k2" => &mut self.k2,
            "tau1" => &mut self.tau1,
            "tau2" => &mut self.tau2,
            "tau3" => &mut self.tau3,
            "tau4" => &mut self.tau4,
            "rho1" => &mut self.rho1,
            "rho2" => &mut self.rho2,
            "rho3" => &mut self.rho3,
            "alpha1" => &mut self.alpha1,
            "alpha2" => &mut self.alpha2,
            "psi" => &mut self.psi,
            "delta" => &mut self.delta,
            "eta" => &mut self.eta,
            "dT" => &mut self.d_t,
            "dA" => &mut self.d_a,
            "dTA" => &mut self.d_ta,
            _ => return None,
        })
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.clone().field_mut(name).map(|v| *v)
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        match self.field_mut(name) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(Error::InvalidArgument(format!("unknown parameter `{name}`"))),
        }
    }

    pub fn with(mut self, name: &str, value: f64) -> Result<Self> {
        self.set(name, value)?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let violations = validate_parameters(self);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameters(
                violations.into_iter().map(|v| v.to_string()).collect(),
            ))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Lists every violated parameter constraint.
pub fn validate_parameters(params: &Parameters) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |field: &'static str, message: String| out.push(Violation { field, message });

    for name in Parameters::FIELD_NAMES {
        let value = params.get(name).unwrap_or(f64::NAN);
        if !value.is_finite() {
            push(name, format!("{name} must be finite"));
        } else if value < 0.0 {
            push(name, format!("{name} ≥ 0 required"));
        }
    }
    if !(params.lambda > 0.0) {
        push("Lambda", "Lambda > 0 required".into());
    }
    if !(params.mu > 0.0) {
        push("mu", "mu > 0 required".into());
    }
    if params.beta1p > 1.0 {
        push("beta1p", "beta1p ≤ 1 required".into());
    }
    for (name, value) in [
        ("beta2p", params.beta2p),
        ("psi", params.psi),
        ("delta", params.delta),
        ("eta", params.eta),
    ] {
        if value < 1.0 {
            push(name, format!("{name} ≥ 1 required"));
        }
    }
    if let Incidence::Constant(n) = params.incidence {
        if !(n.is_finite() && n > 0.0) {
            push("incidence", "incidence population > 0 required".into());
        }
    }
    out
}

/// Population of the ten compartments, people.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StateVector(pub [f64; COMPARTMENTS]);

impl StateVector {
    pub fn new(values: [f64; COMPARTMENTS]) -> Self {
        StateVector(values)
    }

    pub fn zeros() -> Self {
        StateVector([0.0; COMPARTMENTS])
    }

    /// `(Λ/μ, 0, …, 0)`.
    pub fn disease_free(params: &Parameters) -> Self {
        let mut x = Self::zeros();
        x[Compartment::S] = params.dfe_population();
        x
    }

    /// Reference initial condition: 60% S, 14% L_T, 3% I_T, 4% I_H, 1% A,
    /// 12% L_TH, 5% I_TH, 1% A_T of a population `n`.
    pub fn reference_initial(n: f64) -> Self {
        Self::from_fractions(&REFERENCE_FRACTIONS, n)
    }

    pub fn from_fractions(fractions: &[f64; COMPARTMENTS], total: f64) -> Self {
        StateVector(fractions.map(|f| f * total))
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn as_array(&self) -> &[f64; COMPARTMENTS] {
        &self.0
    }

    pub fn scaled(&self, factor: f64) -> Self {
        StateVector(self.0.map(|v| v * factor))
    }

    /// Largest population among the eight infected classes.
    pub fn max_infected(&self) -> f64 {
        Compartment::INFECTED
            .iter()
            .map(|&c| self[c])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&v| v >= 0.0)
    }

    pub fn hiv_part(&self) -> [f64; 3] {
        [self[Compartment::S], self[Compartment::IH], self[Compartment::A]]
    }

    pub fn tb_part(&self) -> [f64; 4] {
        [
            self[Compartment::S],
            self[Compartment::LT],
            self[Compartment::IT],
            self[Compartment::RT],
        ]
    }

    /// Embeds `(S, I_H, A)` with every other class zero.
    pub fn from_hiv_part(x: [f64; 3]) -> Self {
        let mut s = Self::zeros();
        s[Compartment::S] = x[0];
        s[Compartment::IH] = x[1];
        s[Compartment::A] = x[2];
        s
    }

    /// Embeds `(S, L_T, I_T, R_T)` with every other class zero.
    pub fn from_tb_part(x: [f64; 4]) -> Self {
        let mut s = Self::zeros();
        s.0[..4].copy_from_slice(&x);
        s
    }
}

pub const REFERENCE_FRACTIONS: [f64; COMPARTMENTS] = [0.60, 0.14, 0.03, 0.0, 0.04, 0.01, 0.12, 0.05, 0.0, 0.01];

impl Index<Compartment> for StateVector {
    type Output = f64;
    fn index(&self, c: Compartment) -> &f64 {
        &self.0[c.index()]
    }
}

impl IndexMut<Compartment> for StateVector {
    fn index_mut(&mut self, c: Compartment) -> &mut f64 {
        &mut self.0[c.index()]
    }
}

impl From<[f64; COMPARTMENTS]> for StateVector {
    fn from(values: [f64; COMPARTMENTS]) -> Self {
        StateVector(values)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ForceOfInfection {
    pub lambda_t: f64,
    pub lambda_h: f64,
}

pub fn total_population(state: &StateVector) -> f64 {
    state.total()
}

pub fn force_of_infection(state: &StateVector, params: &Parameters) -> Result<ForceOfInfection> {
    use Compartment::*;
    let n = params.incidence.denominator(state.total());
    if n == 0.0 {
        return Err(Error::ZeroPopulation);
    }
    let x = state;
    let tb_infectious = x[IT] + x[ITH] + x[AT];
    let hiv_infectious = x[IH] + x[ITH] + x[LTH] + x[RTH] + params.eta * (x[A] + x[AT]);
    Ok(ForceOfInfection {
        lambda_t: params.beta1 * tb_infectious / n,
        lambda_h: params.beta2 * hiv_infectious / n,
    })
}

/// Time derivative of all ten compartments, people/year.
pub fn full_rhs(state: &StateVector, params: &Parameters) -> Result<[f64; COMPARTMENTS]> {
    let foi = if params.beta1 == 0.0 && params.beta2 == 0.0 {
        ForceOfInfection {
            lambda_t: 0.0,
            lambda_h: 0.0,
        }
    } else {
        force_of_infection(state, params)?
    };
    Ok(rhs_given_foi(state.as_array(), params, foi))
}

pub(crate) fn rhs_given_foi(x: &[f64; COMPARTMENTS], p: &Parameters, foi: ForceOfInfection) -> [f64; COMPARTMENTS] {
    let [s, l_t, i_t, r_t, i_h, a, l_th, i_th, r_th, a_t] = *x;
    let ForceOfInfection {
        lambda_t: lt,
        lambda_h: lh,
    } = foi;
    let mu = p.mu;
    [
        p.lambda - lt * s - lh * s - mu * s,
        lt * s + p.beta1p * lt * r_t - (p.k1 + p.tau1 + mu) * l_t,
        p.k1 * l_t - (p.tau2 + p.d_t + mu + p.delta * lh) * i_t,
        p.tau1 * l_t + p.tau2 * i_t - (p.beta1p * lt + lh + mu) * r_t,
        lh * s - (p.rho1 + p.psi * lt + mu) * i_h + p.alpha1 * a + lh * r_t,
        p.rho1 * i_h - p.alpha1 * a - (mu + p.d_a) * a,
        p.beta2p * lt * r_th - (p.k2 + p.tau4 + mu) * l_th,
        p.delta * lh * i_t + p.psi * lt * i_h + p.alpha2 * a_t + p.k2 * l_th - (p.tau3 + p.rho2 + mu + p.d_t) * i_th,
        p.tau3 * i_th + p.tau4 * l_th - (p.beta2p * lt + p.rho3 + mu) * r_th,
        p.rho2 * i_th + p.rho3 * r_th - (p.alpha2 + mu + p.d_ta) * a_t,
    ]
}

/// HIV/AIDS-only sub-model on `(S, I_H, A)`; `N_H = S + I_H + A` under
/// total incidence.
pub fn hiv_submodel_rhs(state: &[f64; 3], params: &Parameters) -> Result<[f64; 3]> {
    let [s, i_h, a] = *state;
    let n = params.incidence.denominator(s + i_h + a);
    if n == 0.0 {
        return Err(Error::ZeroPopulation);
    }
    let p = params;
    let lh = p.beta2 * (i_h + p.eta * a) / n;
    Ok([
        p.lambda - lh * s - p.mu * s,
        lh * s - (p.rho1 + p.mu) * i_h + p.alpha1 * a,
        p.rho1 * i_h - p.alpha1 * a - (p.mu + p.d_a) * a,
    ])
}

/// TB-only sub-model on `(S, L_T, I_T, R_T)`.
pub fn tb_submodel_rhs(state: &[f64; 4], params: &Parameters) -> Result<[f64; 4]> {
    let [s, l_t, i_t, r_t] = *state;
    let n = params.incidence.denominator(s + l_t + i_t + r_t);
    if n == 0.0 {
        return Err(Error::ZeroPopulation);
    }
    let p = params;
    let lt = p.beta1 * i_t / n;
    Ok([
        p.lambda - lt * s - p.mu * s,
        lt * s + p.beta1p * lt * r_t - (p.k1 + p.tau1 + p.mu) * l_t,
        p.k1 * l_t - (p.tau2 + p.d_t + p.mu) * i_t,
        p.tau1 * l_t + p.tau2 * i_t - (p.beta1p * lt + p.mu) * r_t,
    ])
}

/// `Λ − μN − dT(I_T + I_TH) − dA·A − dTA·A_T`, the exact rate of change of `N`.
pub fn population_balance(state: &StateVector, params: &Parameters) -> f64 {
    use Compartment::*;
    let x = state;
    params.lambda - params.mu * x.total() - params.d_t * (x[IT] + x[ITH]) - params.d_a * x[A] - params.d_ta * x[AT]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> StateVector {
        StateVector::reference_initial(REFERENCE_POPULATION)
    }

    #[test]
    fn total_population_cases() {
        assert_eq!(total_population(&StateVector::zeros()), 0.0);
        let p = Parameters::baseline(0.0, 0.0);
        assert!((total_population(&StateVector::disease_free(&p)) - 49980.0).abs() < 1e-9);
        assert!((total_population(&reference()) - 50000.0).abs() < 1e-9);
    }

    #[test]
    fn force_of_infection_on_reference_state() {
        let p = Parameters::baseline(6.0, 0.1);
        let foi = force_of_infection(&reference(), &p).unwrap();
        assert!((foi.lambda_t - 0.54).abs() < 1e-12);
        assert!((foi.lambda_h - 0.02304).abs() < 1e-12);

        // same values under total incidence since the reference state sums to 50000
        let foi = force_of_infection(&reference(), &p.with_incidence(Incidence::Total)).unwrap();
        assert!((foi.lambda_t - 0.54).abs() < 1e-12);
    }

    #[test]
    fn force_of_infection_vanishes_without_infection() {
        let p = Parameters::baseline(6.0, 0.1);
        let mut x = StateVector::zeros();
        x[Compartment::S] = 1000.0;
        x[Compartment::RT] = 50.0;
        let foi = force_of_infection(&x, &p).unwrap();
        assert_eq!((foi.lambda_t, foi.lambda_h), (0.0, 0.0));
    }

    #[test]
    fn zero_population_is_a_domain_error() {
        let p = Parameters::baseline(6.0, 0.1).with_incidence(Incidence::Total);
        assert!(matches!(
            force_of_infection(&StateVector::zeros(), &p),
            Err(Error::ZeroPopulation)
        ));
        assert!(full_rhs(&StateVector::zeros(), &p).is_err());
        assert!(hiv_submodel_rhs(&[0.0; 3], &p).is_err());
        assert!(tb_submodel_rhs(&[0.0; 4], &p).is_err());
        // no transmission: the empty population just recruits
        let quiet = p.with_betas(0.0, 0.0);
        let d = full_rhs(&StateVector::zeros(), &quiet).unwrap();
        assert_eq!(d[0], 714.0);
    }

    #[test]
    fn dfe_is_a_fixed_point() {
        for inc in [Incidence::Total, Incidence::Constant(50_000.0)] {
            let p = Parameters::baseline(6.0, 0.1).with_incidence(inc);
            let d = full_rhs(&StateVector::disease_free(&p), &p).unwrap();
            assert!(d.iter().all(|&v| v == 0.0), "{d:?}");
            let d = hiv_submodel_rhs(&[p.dfe_population(), 0.0, 0.0], &p).unwrap();
            assert_eq!(d, [0.0; 3]);
            let d = tb_submodel_rhs(&[p.dfe_population(), 0.0, 0.0, 0.0], &p).unwrap();
            assert_eq!(d, [0.0; 4]);
        }
    }

    #[test]
    fn susceptible_only_state() {
        let p = Parameters::baseline(6.0, 0.1);
        let mut x = StateVector::zeros();
        x[Compartment::S] = 30_000.0;
        let d = full_rhs(&x, &p).unwrap();
        assert_eq!(d[0], p.lambda - p.mu * 30_000.0);
        assert!(d[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn full_rhs_term_by_term_on_reference_state() {
        // Independent evaluation with λ_T = 0.54, λ_H = 0.02304 and N = 50000.
        let p = Parameters::baseline(6.0, 0.1);
        let (lt, lh, mu) = (0.54, 0.02304, 1.0 / 70.0);
        let (s, l_t, i_t, r_t, i_h, a, l_th, i_th, r_th, a_t) =
            (30000.0, 7000.0, 1500.0, 0.0, 2000.0, 500.0, 6000.0, 2500.0, 0.0, 500.0);
        let expected: [f64; 10] = [
            714.0 - lt * s - lh * s - mu * s,
            lt * s + 0.9 * lt * r_t - (1.0 + 1.0 + mu) * l_t,
            1.0 * l_t - (2.0 + 0.125 + mu + 1.03 * lh) * i_t,
            1.0 * l_t + 2.0 * i_t - (0.9 * lt + lh + mu) * r_t,
            lh * s - (0.1 + 1.07 * lt + mu) * i_h + 0.33 * a + lh * r_t,
            0.1 * i_h - 0.33 * a - (mu + 0.3) * a,
            1.1 * lt * r_th - (1.3 + 1.0 + mu) * l_th,
            1.03 * lh * i_t + 1.07 * lt * i_h + 0.33 * a_t + 1.3 * l_th - (2.0 + 0.25 + mu + 0.125) * i_th,
            2.0 * i_th + 1.0 * l_th - (1.1 * lt + 0.125 + mu) * r_th,
            0.25 * i_th + 0.125 * r_th - (0.33 + mu + 0.33) * a_t,
        ];
        // Frozen spot values from the hand evaluation above.
        let d = full_rhs(&reference(), &p).unwrap();
        // Spot values from a separate script evaluation.
        assert!((d[0] - (-16605.771428571432)).abs() < 1e-6);
        assert!((d[1] - 2100.0).abs() < 1e-6);
        assert!((d[7] - 3182.9825142857144).abs() < 1e-6);
        for (i, (got, want)) in d.iter().zip(expected).enumerate() {
            assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "{i}: {got} vs {want}");
        }
    }

    #[test]
    fn baseline_is_valid_and_violations_are_named() {
        assert!(validate_parameters(&Parameters::baseline(6.0, 0.1)).is_empty());

        let mut p = Parameters::baseline(6.0, 0.1);
        p.mu = 0.0;
        let v = validate_parameters(&p);
        assert!(v.iter().any(|v| v.field == "mu" && v.message == "mu > 0 required"));

        let mut p = Parameters::baseline(6.0, 0.1);
        p.beta1p = 1.5;
        let v = validate_parameters(&p);
        assert_eq!(v.len(), 1);
        assert!(v[0].message.contains("beta1p ≤ 1"));

        let mut p = Parameters::baseline(6.0, 0.1);
        p.eta = 0.5;
        p.tau3 = -1.0;
        let fields: Vec<_> = validate_parameters(&p).iter().map(|v| v.field).collect();
        assert_eq!(fields, vec!["tau3", "eta"]);

        let p = Parameters::baseline(6.0, 0.1).with_incidence(Incidence::Constant(0.0));
        assert!(p.validate().is_err());
    }

    #[test]
    fn field_access_by_name() {
        let mut p = Parameters::baseline(6.0, 0.1);
        for name in Parameters::FIELD_NAMES {
            assert!(p.get(name).is_some(), "{name}");
        }
        p.set("dTA", 0.5).unwrap();
        assert_eq!(p.d_ta, 0.5);
        assert_eq!(p.get("k2"), Some(1.3));
        assert!(p.set("gamma", 1.0).is_err());
    }

    #[test]
    fn compartment_labels_round_trip() {
        for c in Compartment::ALL {
            assert_eq!(Compartment::from_label(c.label()), Some(c));
        }
        assert_eq!(Compartment::from_label("X"), None);
    }
}
