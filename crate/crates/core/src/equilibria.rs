//! Equilibria: disease-free, TB-free, HIV-free and syndemic.

use std::fmt;

use nalgebra::DVector;

use crate::dynamics::steady_state_by_integration;
use crate::error::{Error, Result};
use crate::model::{full_rhs, hiv_submodel_rhs, tb_submodel_rhs, Compartment, Incidence, Parameters, StateVector};
use crate::reproduction::{r0, r0_model, r2_closed, ReproductionNumbers};
use crate::stability::fd_jacobian;

/// Newton stops once `‖f(x)‖₂ / N` falls below this.
pub const NEWTON_TOL: f64 = 1e-10;
pub const NEWTON_MAX_ITER: usize = 200;
pub const NEWTON_MAX_HALVINGS: usize = 20;
/// Full steps taken even when the seed already meets the tolerance; the
/// population-scaled residual cannot see a handful of infected people.
pub const NEWTON_MIN_ITER: usize = 2;
/// Components below this many people count as absent when classifying.
pub const PRESENCE_THRESHOLD: f64 = 1e-6;
pub const SEED_HORIZON: f64 = 500.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EquilibriumKind {
    DiseaseFree,
    HivFree,
    TbFree,
    Syndemic,
}

impl EquilibriumKind {
    pub fn label(self) -> &'static str {
        match self {
            EquilibriumKind::DiseaseFree => "disease-free",
            EquilibriumKind::HivFree => "hiv-free",
            EquilibriumKind::TbFree => "tb-free",
            EquilibriumKind::Syndemic => "syndemic",
        }
    }

    /// Which diseases persist in `state`.
    pub fn of_state(state: &StateVector) -> Self {
        use Compartment::*;
        let present = |cs: &[Compartment]| cs.iter().any(|&c| state[c] > PRESENCE_THRESHOLD);
        let tb = present(&[LT, IT, LTH, ITH, RTH, AT]);
        let hiv = present(&[IH, A, LTH, ITH, RTH, AT]);
        match (tb, hiv) {
            (false, false) => EquilibriumKind::DiseaseFree,
            (true, false) => EquilibriumKind::HivFree,
            (false, true) => EquilibriumKind::TbFree,
            (true, true) => EquilibriumKind::Syndemic,
        }
    }
}

impl fmt::Display for EquilibriumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumReport {
    pub kind: EquilibriumKind,
    pub state: StateVector,
    /// `‖f(x)‖₂ / N`.
    pub residual: f64,
    pub repro: ReproductionNumbers,
    /// False when the requested equilibrium does not exist for these
    /// parameters and the disease-free state is returned instead.
    pub exists: bool,
    pub iterations: usize,
}

impl EquilibriumReport {
    pub fn converged(&self) -> bool {
        self.residual < NEWTON_TOL
    }
}

/// `‖full_rhs(x)‖₂ / N`.
pub fn residual(state: &StateVector, params: &Parameters) -> Result<f64> {
    let n = state.total();
    if n == 0.0 {
        return Err(Error::ZeroPopulation);
    }
    let f = full_rhs(state, params)?;
    Ok(f.iter().map(|v| v * v).sum::<f64>().sqrt() / n)
}

pub fn disease_free(params: &Parameters) -> EquilibriumReport {
    EquilibriumReport {
        kind: EquilibriumKind::DiseaseFree,
        state: StateVector::disease_free(params),
        residual: 0.0,
        repro: r0_model(params),
        exists: true,
        iterations: 0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TbFreeClosed {
    pub s: f64,
    pub i_h: f64,
    pub a: f64,
    /// The formulas without clamping; negative when `R2 < 1`.
    pub i_h_signed: f64,
    pub a_signed: f64,
    pub r2: f64,
    pub exists: bool,
}

/// `S★ = Λ/(μR2)`,
/// `I_H★ = (R2−1) μ N_H (α1+dA+μ) / (β2(α1+dA+μ+ηρ1))`,
/// `A★ = (R2−1) ρ1 μ N_H / (β2(α1+dA+μ+ηρ1))`, with `R2` evaluated at `N_H`.
pub fn tb_free_closed(p: &Parameters, n_h: f64) -> TbFreeClosed {
    let r2 = r2_closed(p, n_h);
    if p.beta2 == 0.0 {
        return TbFreeClosed {
            s: p.dfe_population(),
            i_h: 0.0,
            a: 0.0,
            i_h_signed: 0.0,
            a_signed: 0.0,
            r2,
            exists: false,
        };
    }
    let den = p.beta2 * (p.alpha1 + p.d_a + p.mu + p.eta * p.rho1);
    let i_h_signed = (r2 - 1.0) * p.mu * n_h * (p.alpha1 + p.d_a + p.mu) / den;
    let a_signed = (r2 - 1.0) * p.rho1 * p.mu * n_h / den;
    let exists = r2 > 1.0;
    TbFreeClosed {
        s: if exists {
            p.lambda / (p.mu * r2)
        } else {
            p.dfe_population()
        },
        i_h: i_h_signed.max(0.0),
        a: a_signed.max(0.0),
        i_h_signed,
        a_signed,
        r2,
        exists,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonOutcome {
    pub x: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Damped Newton iteration on `f(x) = 0` with finite-difference Jacobians.
/// The residual is `‖f‖₂ / Σx`.
pub fn newton<F>(f: F, x0: &[f64]) -> Result<NewtonOutcome>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let scaled = |x: &[f64], fx: &[f64]| {
        let n: f64 = x.iter().sum::<f64>().abs().max(f64::MIN_POSITIVE);
        fx.iter().map(|v| v * v).sum::<f64>().sqrt() / n
    };
    let mut x = x0.to_vec();
    let mut fx = f(&x)?;
    let mut res = scaled(&x, &fx);
    for iter in 0..NEWTON_MAX_ITER {
        if !res.is_finite() {
            return Err(Error::NonFinite("Newton residual"));
        }
        if res < NEWTON_TOL && iter >= NEWTON_MIN_ITER {
            return Ok(NewtonOutcome {
                x,
                residual: res,
                iterations: iter,
            });
        }
        let jac = fd_jacobian(&f, &x)?;
        let rhs = DVector::from_iterator(fx.len(), fx.iter().map(|v| -v));
        let step = jac.lu().solve(&rhs).ok_or(Error::SingularMatrix("Newton Jacobian"))?;

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..=NEWTON_MAX_HALVINGS {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| a + alpha * d).collect();
            if let Ok(ft) = f(&trial) {
                let rt = scaled(&trial, &ft);
                if rt.is_finite() && (rt < res || (rt == 0.0 && res == 0.0)) {
                    accepted = Some((trial, ft, rt));
                    break;
                }
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((xt, ft, rt)) => {
                x = xt;
                fx = ft;
                res = rt;
            }
            None if res < NEWTON_TOL => {
                return Ok(NewtonOutcome {
                    x,
                    residual: res,
                    iterations: iter,
                });
            }
            None => {
                return Err(Error::NewtonFailed {
                    iterations: iter + 1,
                    residual: res,
                    last: x,
                });
            }
        }
    }
    if res < NEWTON_TOL {
        Ok(NewtonOutcome {
            x,
            residual: res,
            iterations: NEWTON_MAX_ITER,
        })
    } else {
        Err(Error::NewtonFailed {
            iterations: NEWTON_MAX_ITER,
            residual: res,
            last: x,
        })
    }
}

fn report_for(params: &Parameters, state: StateVector, iterations: usize, exists: bool) -> Result<EquilibriumReport> {
    Ok(EquilibriumReport {
        kind: EquilibriumKind::of_state(&state),
        residual: residual(&state, params)?,
        state,
        repro: r0_model(params),
        exists,
        iterations,
    })
}

/// TB-free equilibrium by Newton on the `(S, I_H, A)` sub-model, seeded by
/// the closed form at the self-consistent population.
pub fn tb_free_numeric(params: &Parameters) -> Result<EquilibriumReport> {
    let n_ref = params.incidence.reference_population(params);
    if r2_closed(params, n_ref) <= 1.0 {
        let mut rep = disease_free(params);
        rep.exists = false;
        return Ok(rep);
    }
    let n_h = match params.incidence {
        Incidence::Constant(n) => n,
        Incidence::Total => self_consistent_population(params)?,
    };
    let closed = tb_free_closed(params, n_h);
    let out = newton(
        |x| Ok(hiv_submodel_rhs(&[x[0], x[1], x[2]], params)?.to_vec()),
        &[closed.s, closed.i_h, closed.a],
    )?;
    let state = StateVector::from_hiv_part([out.x[0], out.x[1], out.x[2]]);
    report_for(params, state, out.iterations, true)
}

/// Population `N_H` at which the closed form, evaluated with incidence
/// denominator `N_H`, sums to `N_H` itself. Near the threshold the flow
/// approaches this state over millennia, so it is located by bisection
/// rather than by integration.
fn self_consistent_population(params: &Parameters) -> Result<f64> {
    let gap = |n: f64| {
        let c = tb_free_closed(params, n);
        c.s + c.i_h_signed + c.a_signed - n
    };
    let mut hi = params.dfe_population();
    if gap(hi) >= 0.0 {
        return Ok(hi);
    }
    let mut lo = hi;
    while gap(lo) < 0.0 || tb_free_closed(params, lo).i_h_signed <= 0.0 {
        lo *= 0.5;
        if lo < 1e-9 * hi {
            return Err(Error::NonFinite("no self-consistent tb-free population"));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// HIV-free equilibrium by Newton on the `(S, L_T, I_T, R_T)` sub-model.
pub fn hiv_free(params: &Parameters) -> Result<EquilibriumReport> {
    let n_ref = params.incidence.reference_population(params);
    if crate::reproduction::r1_closed(params, n_ref) <= 1.0 {
        let mut rep = disease_free(params);
        rep.exists = false;
        return Ok(rep);
    }
    let n0 = params.dfe_population();
    let start = StateVector::from_tb_part([0.6 * n0, 0.14 * n0, 0.03 * n0, 0.23 * n0]);
    let seed = steady_state_by_integration(params, &start, SEED_HORIZON, NEWTON_TOL)?;
    let out = newton(
        |x| Ok(tb_submodel_rhs(&[x[0], x[1], x[2], x[3]], params)?.to_vec()),
        &seed.state.tb_part(),
    )?;
    let state = StateVector::from_tb_part([out.x[0], out.x[1], out.x[2], out.x[3]]);
    report_for(params, state, out.iterations, true)
}

/// Interior equilibrium by Newton on the full system, seeded by a long
/// integration from `seed`. If the flow settles on a boundary equilibrium
/// the report's kind says so.
pub fn syndemic(params: &Parameters, seed: &StateVector) -> Result<EquilibriumReport> {
    let settled = steady_state_by_integration(params, seed, SEED_HORIZON, NEWTON_TOL)?;
    let out = newton(
        |x| {
            let s = StateVector(x.try_into().expect("ten components"));
            Ok(full_rhs(&s, params)?.to_vec())
        },
        settled.state.as_array(),
    )?;
    let state = StateVector(out.x.as_slice().try_into().expect("ten components"));
    let kind = EquilibriumKind::of_state(&state);
    let mut rep = report_for(params, state, out.iterations, kind == EquilibriumKind::Syndemic)?;
    rep.kind = kind;
    Ok(rep)
}

/// Reproduction numbers at an explicit `n_ref`, for reports that pin a
/// published value to a particular prefactor.
pub fn repro_at(params: &Parameters, n_ref: f64) -> ReproductionNumbers {
    r0(params, n_ref)
}
