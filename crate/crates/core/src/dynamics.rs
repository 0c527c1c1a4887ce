//! Time integration and invariant monitoring.
//!
//! [`integrate`] is a Dormand–Prince 5(4) pair with PI step-size control,
//! generic over fixed-size state arrays. [`simulate`] wraps it for the
//! ten-compartment model and returns a [`Trajectory`].

use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::model::{full_rhs, Parameters, StateVector, COMPARTMENTS};

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// Difference between the 5th and embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const PI_BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - PI_BETA * 0.75;
const FAC_MAX: f64 = 5.0; // max growth per step
const FAC_MIN: f64 = 0.1; // max shrink per step (as 1/fac)
pub const H_MIN: f64 = 1e-12;

/// Integrator settings.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Times at which the solution is recorded; steps are shortened to land
    /// on them exactly. `None` records every accepted step.
    pub report_times: Option<Vec<f64>>,
    /// Clamp small negative components to zero and reject steps that go
    /// further negative than `abs_tol`.
    pub nonnegative: bool,
    pub max_steps: usize,
}

impl IntegratorOptions {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        IntegratorOptions {
            rel_tol,
            abs_tol,
            report_times: None,
            nonnegative: false,
            max_steps: 5_000_000,
        }
    }

    /// `rel = 1e-8`, `abs = 1e-8·scale`, nonnegativity enforced.
    pub fn for_population(scale: f64) -> Self {
        IntegratorOptions {
            nonnegative: true,
            ..Self::new(1e-8, 1e-8 * scale.abs().max(1.0))
        }
    }

    pub fn with_report_times(mut self, times: Vec<f64>) -> Self {
        self.report_times = Some(times);
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    pub clamped: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
    pub stats: StepStats,
    /// False when the observer stopped the run before `t1`.
    pub reached_end: bool,
}

/// Integrates `y' = f(t, y)` from `t0` to `t1`.
pub fn integrate<const N: usize, F>(
    rhs: F,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    opts: &IntegratorOptions,
) -> Result<Solution<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    integrate_observed(rhs, y0, t0, t1, opts, |_, _, _| ControlFlow::Continue(()))
}

/// Like [`integrate`], calling `observer(t, y, f(t, y))` after every
/// accepted step. Returning `Break` ends the run at that point.
pub fn integrate_observed<const N: usize, F, O>(
    mut rhs: F,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    opts: &IntegratorOptions,
    mut observer: O,
) -> Result<Solution<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    O: FnMut(f64, &[f64; N], &[f64; N]) -> ControlFlow<()>,
{
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "integration interval must satisfy t0 < t1 (got {t0}, {t1})"
        )));
    }
    if !(opts.rel_tol > 0.0 && opts.abs_tol > 0.0) {
        return Err(Error::InvalidArgument("tolerances must be positive".into()));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("initial state"));
    }

    let mut report: Vec<f64> = match &opts.report_times {
        Some(ts) => {
            if ts.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::InvalidArgument("report times must increase".into()));
            }
            if ts.iter().any(|&t| t < t0 || t > t1) {
                return Err(Error::InvalidArgument("report times outside [t0, t1]".into()));
            }
            ts.clone()
        }
        None => Vec::new(),
    };
    let dense = opts.report_times.is_none();
    report.reverse(); // pop from the back

    let mut stats = StepStats::default();
    let mut times = Vec::new();
    let mut states = Vec::new();

    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y)?;
    stats.rhs_evals += 1;

    let record_initial = dense || report.last() == Some(&t0);
    if record_initial {
        times.push(t);
        states.push(y);
        if !dense {
            report.pop();
        }
    }
    if observer(t, &y, &k1).is_break() {
        return Ok(Solution {
            times,
            states,
            stats,
            reached_end: false,
        });
    }

    let span = t1 - t0;
    let h_max = span;
    let mut h = span / 1000.0;
    let mut fac_old = 1e-4_f64;
    let mut last_rejected = false;

    while t < t1 {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(failure(t, &y, "maximum number of steps exceeded"));
        }
        if h < H_MIN {
            return Err(failure(t, &y, "step size underflow"));
        }

        // Land exactly on the next report time (or t1).
        let target = report.last().copied().unwrap_or(t1).min(t1);
        let mut h_step = h.min(h_max);
        let mut hits_target = false;
        if t + h_step >= target - 1e-12 * target.abs().max(1.0) {
            h_step = target - t;
            hits_target = true;
        }

        let (mut y_new, mut k7, err) = dopri_step(&mut rhs, t, &y, &k1, h_step, opts)?;
        stats.rhs_evals += 6;

        if !err.is_finite() {
            stats.rejected += 1;
            h = h_step * 0.25;
            last_rejected = true;
            continue;
        }

        let mut accept = err <= 1.0;
        let mut clamped_now = false;
        if accept && opts.nonnegative {
            let worst = y_new.iter().copied().fold(0.0_f64, f64::min);
            if worst < -opts.abs_tol {
                accept = false;
            } else if worst < 0.0 {
                for v in y_new.iter_mut() {
                    if *v < 0.0 {
                        *v = 0.0;
                    }
                }
                stats.clamped += 1;
                clamped_now = true;
            }
        }

        if accept {
            let t_new = if hits_target { target } else { t + h_step };
            // The FSAL derivative belongs to the unclamped point.
            if clamped_now {
                k7 = rhs(t_new, &y_new)?;
                stats.rhs_evals += 1;
            }
            stats.accepted += 1;
            t = t_new;
            y = y_new;
            k1 = k7;

            if dense {
                times.push(t);
                states.push(y);
            } else if hits_target && report.last() == Some(&target) {
                times.push(t);
                states.push(y);
                report.pop();
            }

            // PI controller
            let fac11 = err.max(1e-300).powf(EXPO1);
            let mut fac = fac11 / fac_old.powf(PI_BETA);
            fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = h_step / fac;
            if last_rejected {
                h_new = h_new.min(h_step);
            }
            fac_old = err.max(1e-4);
            last_rejected = false;
            // Do not let a short step onto a report time throttle the next one.
            h = if hits_target { h_new.max(h) } else { h_new };

            if observer(t, &y, &k1).is_break() {
                return Ok(Solution {
                    times,
                    states,
                    stats,
                    reached_end: t >= t1,
                });
            }
        } else {
            stats.rejected += 1;
            let fac11 = err.max(1e-300).powf(EXPO1);
            h = if err > 1.0 && err.is_finite() {
                h_step / (fac11 / SAFETY).min(1.0 / FAC_MIN)
            } else {
                // negativity rejection
                h_step * 0.5
            };
            last_rejected = true;
        }
    }

    Ok(Solution {
        times,
        states,
        stats,
        reached_end: true,
    })
}

fn failure<const N: usize>(t: f64, y: &[f64; N], reason: &str) -> Error {
    Error::IntegrationFailed {
        t,
        state: y.to_vec(),
        reason: reason.to_string(),
    }
}

#[allow(clippy::type_complexity)]
fn dopri_step<const N: usize, F>(
    rhs: &mut F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
    opts: &IntegratorOptions,
) -> Result<([f64; N], [f64; N], f64)>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let stage = |coef: &[(f64, &[f64; N])]| -> [f64; N] {
        let mut out = *y;
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (c, k) in coef {
                acc += c * k[i];
            }
            *o += h * acc;
        }
        out
    };

    let k2 = rhs(t + C2 * h, &stage(&[(A21, k1)]))?;
    let k3 = rhs(t + C3 * h, &stage(&[(A31, k1), (A32, &k2)]))?;
    let k4 = rhs(t + C4 * h, &stage(&[(A41, k1), (A42, &k2), (A43, &k3)]))?;
    let k5 = rhs(t + C5 * h, &stage(&[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
    let k6 = rhs(
        t + h,
        &stage(&[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
    )?;
    let y_new = stage(&[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
    let k7 = rhs(t + h, &y_new)?;

    let mut sum = 0.0;
    for i in 0..N {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
        sum += (e / scale).powi(2);
    }
    let err = (sum / N as f64).sqrt();
    Ok((y_new, k7, err))
}

/// Solution of the full model.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub params: Parameters,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn terminal(&self) -> &StateVector {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn totals(&self) -> Vec<f64> {
        self.states.iter().map(StateVector::total).collect()
    }

    pub fn series(&self, index: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.0[index]).collect()
    }

    /// `t, S, L_T, …, A_T, N` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for c in crate::model::Compartment::ALL {
            out.push(',');
            out.push_str(c.label());
        }
        out.push_str(",N\n");
        for (t, s) in self.times.iter().zip(&self.states) {
            out.push_str(&format!("{t}"));
            for v in s.0 {
                out.push_str(&format!(",{v}"));
            }
            out.push_str(&format!(",{}\n", s.total()));
        }
        out
    }
}

/// `n + 1` evenly spaced times over `[0, horizon]`.
pub fn uniform_grid(horizon: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| horizon * i as f64 / n as f64).collect()
}

/// Integrates the full model from `state0` over `[0, horizon]` with the
/// default population-scaled tolerances.
pub fn simulate(
    params: &Parameters,
    state0: &StateVector,
    horizon: f64,
    report_times: Option<Vec<f64>>,
) -> Result<Trajectory> {
    let mut opts = IntegratorOptions::for_population(state0.total());
    opts.report_times = report_times;
    simulate_with(params, state0, horizon, &opts)
}

pub fn simulate_with(
    params: &Parameters,
    state0: &StateVector,
    horizon: f64,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    if !state0.is_nonnegative() {
        return Err(Error::InvalidArgument("initial state must be nonnegative".into()));
    }
    let sol = integrate(
        |_, y: &[f64; COMPARTMENTS]| full_rhs(&StateVector(*y), params),
        state0.0,
        0.0,
        horizon,
        opts,
    )?;
    Ok(Trajectory {
        times: sol.times,
        states: sol.states.into_iter().map(StateVector).collect(),
        params: params.clone(),
        stats: sol.stats,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    Negativity,
    BoundExceeded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantViolation {
    pub time: f64,
    pub kind: ViolationKind,
    /// Offending compartment for negativity; `None` for the population bound.
    pub component: Option<usize>,
    /// Amount by which the constraint is exceeded.
    pub magnitude: f64,
}

/// Scans a trajectory for negative components and for
/// `N(t) > max(N(0), Λ/μ) + tol`.
pub fn invariant_monitor(traj: &Trajectory, params: &Parameters, tol: f64) -> Vec<InvariantViolation> {
    let mut out = Vec::new();
    let Some(first) = traj.states.first() else {
        return out;
    };
    let bound = first.total().max(params.dfe_population());
    for (&t, s) in traj.times.iter().zip(&traj.states) {
        for (i, &v) in s.0.iter().enumerate() {
            if v < -tol {
                out.push(InvariantViolation {
                    time: t,
                    kind: ViolationKind::Negativity,
                    component: Some(i),
                    magnitude: -v,
                });
            }
        }
        let excess = s.total() - bound;
        if excess > tol {
            out.push(InvariantViolation {
                time: t,
                kind: ViolationKind::BoundExceeded,
                component: None,
                magnitude: excess,
            });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct SteadyState {
    pub state: StateVector,
    pub time: f64,
    pub converged: bool,
}

/// Integrates until `‖f(x)‖₂ / N < settle_tol` or the horizon is reached.
pub fn steady_state_by_integration(
    params: &Parameters,
    state0: &StateVector,
    horizon: f64,
    settle_tol: f64,
) -> Result<SteadyState> {
    if !(horizon > 0.0) {
        return Err(Error::InvalidArgument("horizon must be positive".into()));
    }
    let settled = |y: &[f64; COMPARTMENTS], dy: &[f64; COMPARTMENTS]| {
        let n: f64 = y.iter().sum();
        let norm = dy.iter().map(|v| v * v).sum::<f64>().sqrt();
        n > 0.0 && norm / n < settle_tol
    };
    let opts = IntegratorOptions::for_population(state0.total());
    let mut converged = false;
    let sol = integrate_observed(
        |_, y: &[f64; COMPARTMENTS]| full_rhs(&StateVector(*y), params),
        state0.0,
        0.0,
        horizon,
        &opts,
        |_, y, dy| {
            if settled(y, dy) {
                converged = true;
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        },
    )?;
    let time = *sol.times.last().unwrap_or(&0.0);
    let state = StateVector(*sol.states.last().unwrap_or(&state0.0));
    Ok(SteadyState { state, time, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Compartment, Incidence, REFERENCE_POPULATION};

    const SIGMA_STAR: [f64; 10] = [
        4766.84, 2019.66, 943.06, 28621.89, 362.66, 56.29, 31.39, 55.15, 495.68, 112.33,
    ];

    #[test]
    fn exponential_decay_matches_closed_form() {
        let opts = IntegratorOptions::new(1e-10, 1e-12);
        let sol = integrate(|_, y: &[f64; 1]| Ok([-0.7 * y[0]]), [2.0], 0.0, 5.0, &opts).unwrap();
        let exact = 2.0 * (-3.5f64).exp();
        assert!((sol.states.last().unwrap()[0] - exact).abs() < 1e-9 * exact.max(1.0));
        assert!(sol.reached_end);
        assert_eq!(*sol.times.last().unwrap(), 5.0);
    }

    #[test]
    fn harmonic_oscillator_conserves_energy() {
        let opts = IntegratorOptions::new(1e-10, 1e-10);
        let sol = integrate(|_, y: &[f64; 2]| Ok([y[1], -y[0]]), [1.0, 0.0], 0.0, 20.0, &opts).unwrap();
        let y = sol.states.last().unwrap();
        assert!((y[0] - 20f64.cos()).abs() < 1e-7);
        assert!((y[1] + 20f64.sin()).abs() < 1e-7);
    }

    #[test]
    fn report_times_are_hit_exactly() {
        let grid = uniform_grid(20.0, 240);
        let opts = IntegratorOptions::new(1e-8, 1e-8).with_report_times(grid.clone());
        let sol = integrate(|t, _: &[f64; 1]| Ok([t.cos()]), [0.0], 0.0, 20.0, &opts).unwrap();
        assert_eq!(sol.times, grid);
        for (t, y) in sol.times.iter().zip(&sol.states) {
            assert!((y[0] - t.sin()).abs() < 1e-6);
        }
    }

    #[test]
    fn bad_arguments_are_rejected() {
        let opts = IntegratorOptions::new(1e-8, 1e-8);
        let f = |_: f64, y: &[f64; 1]| Ok([y[0]]);
        assert!(integrate(f, [1.0], 1.0, 1.0, &opts).is_err());
        assert!(integrate(f, [1.0], 0.0, 1.0, &IntegratorOptions::new(0.0, 1e-8)).is_err());
        assert!(integrate(f, [f64::NAN], 0.0, 1.0, &opts).is_err());
    }

    #[test]
    fn blow_up_reports_failure_with_last_state() {
        // y' = y², y(0) = 1 escapes at t = 1.
        let opts = IntegratorOptions::new(1e-8, 1e-8);
        let err = integrate(|_, y: &[f64; 1]| Ok([y[0] * y[0]]), [1.0], 0.0, 2.0, &opts).unwrap_err();
        match err {
            Error::IntegrationFailed { t, state, .. } => {
                assert!((t - 1.0).abs() < 1e-2, "{t}");
                assert!(state[0] > 1e3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn susceptible_relaxation_without_transmission() {
        let p = Parameters::baseline(0.0, 0.0);
        let mut x0 = StateVector::zeros();
        x0[Compartment::S] = 30_000.0;
        let traj = simulate(&p, &x0, 50.0, None).unwrap();
        let target = p.dfe_population();
        let exact = target + (30_000.0 - target) * (-p.mu * 50.0).exp();
        let got = traj.terminal()[Compartment::S];
        assert!((got - exact).abs() < 1e-7 * exact, "{got} vs {exact}");
    }

    #[test]
    fn dfe_stays_put() {
        let p = Parameters::baseline(6.0, 0.1);
        let x0 = StateVector::disease_free(&p);
        let traj = simulate(&p, &x0, 100.0, None).unwrap();
        for (a, b) in traj.terminal().0.iter().zip(x0.0) {
            assert!((a - b).abs() <= 1e-8 * x0.total());
        }
    }

    #[test]
    fn monitor_flags_hand_built_violations() {
        let p = Parameters::baseline(6.0, 0.1);
        let good = StateVector::reference_initial(REFERENCE_POPULATION);
        let mut bad = good;
        bad.0[3] = -1.0;
        let traj = Trajectory {
            times: vec![0.0, 1.0],
            states: vec![good, bad],
            params: p.clone(),
            stats: StepStats::default(),
        };
        let v = invariant_monitor(&traj, &p, 1e-6);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::Negativity);
        assert_eq!(v[0].component, Some(3));
        assert_eq!(v[0].magnitude, 1.0);

        let mut big = good;
        big.0[0] += 100.0;
        let traj = Trajectory {
            states: vec![good, big],
            ..traj
        };
        let v = invariant_monitor(&traj, &p, 1e-6);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::BoundExceeded);
    }

    #[test]
    fn reference_run_stays_in_feasible_region() {
        let p = Parameters::baseline(6.0, 0.1);
        let x0 = StateVector::reference_initial(REFERENCE_POPULATION);
        let traj = simulate(&p, &x0, 20.0, Some(uniform_grid(20.0, 240))).unwrap();
        assert_eq!(traj.times.len(), 241);
        assert!(invariant_monitor(&traj, &p, 1e-9 * REFERENCE_POPULATION).is_empty());
    }

    #[test]
    fn steady_state_from_dfe_is_immediate() {
        let p = Parameters::baseline(6.0, 0.1);
        let ss = steady_state_by_integration(&p, &StateVector::disease_free(&p), 10.0, 1e-12).unwrap();
        assert!(ss.converged);
        assert_eq!(ss.time, 0.0);
    }

    #[test]
    fn long_run_reaches_syndemic_state() {
        let p = Parameters::baseline(6.0, 0.1);
        let x0 = StateVector::reference_initial(REFERENCE_POPULATION);
        let ss = steady_state_by_integration(&p, &x0, 500.0, 1e-10).unwrap();
        for (got, want) in ss.state.0.iter().zip(SIGMA_STAR) {
            assert!((got - want).abs() < 0.01 * want, "{got} vs {want}");
        }
    }

    #[test]
    fn total_incidence_misses_the_published_equilibrium() {
        // With N(t) in the denominators the long-run state is far from the
        // published one (e.g. I_T ≈ 2097 instead of 943).
        let p = Parameters::baseline(6.0, 0.1).with_incidence(Incidence::Total);
        let x0 = StateVector::reference_initial(REFERENCE_POPULATION);
        let ss = steady_state_by_integration(&p, &x0, 500.0, 1e-10).unwrap();
        assert!((ss.state[Compartment::IT] - 943.06).abs() > 0.5 * 943.06);
    }
}
