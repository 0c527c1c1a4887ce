//! Jacobians, spectra and stability classification.

pub mod bifurcation;
pub mod eigen;

use std::fmt;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::model::{force_of_infection, full_rhs, Compartment, Parameters, StateVector, COMPARTMENTS};

pub use bifurcation::{bifurcation_analysis, hiv_dfe_jacobian, BifurcationReport};
pub use eigen::{dominant_real, eigenvalues};

/// Real-part threshold (1/year) separating stable, marginal and unstable.
pub const TOL_EIG: f64 = 1e-7;

/// Central-difference Jacobian of `f` at `x` with step
/// `h_i = max(1e-6, 1e-6·|x_i|)` and one Richardson level.
pub fn fd_jacobian<F>(f: F, x: &[f64]) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = x.len();
    let m = f(x)?.len();
    let mut jac = DMatrix::zeros(m, n);
    let mut probe = x.to_vec();
    let central = |i: usize, h: f64, probe: &mut Vec<f64>| -> Result<Vec<f64>> {
        probe[i] = x[i] + h;
        let fp = f(probe)?;
        probe[i] = x[i] - h;
        let fm = f(probe)?;
        probe[i] = x[i];
        Ok(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect())
    };
    for i in 0..n {
        let h = (1e-6 * x[i].abs()).max(1e-6);
        let coarse = central(i, h, &mut probe)?;
        let fine = central(i, h / 2.0, &mut probe)?;
        for k in 0..m {
            let v = (4.0 * fine[k] - coarse[k]) / 3.0;
            if !v.is_finite() {
                return Err(Error::NonFinite("Jacobian probe"));
            }
            jac[(k, i)] = v;
        }
    }
    Ok(jac)
}

/// Jacobian of the full model at `state`.
pub fn jacobian(state: &StateVector, params: &Parameters) -> Result<DMatrix<f64>> {
    fd_jacobian(
        |x| {
            let s = StateVector(x.try_into().expect("ten components"));
            Ok(full_rhs(&s, params)?.to_vec())
        },
        state.as_array(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Stable,
    Marginal,
    Unstable,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Stable => "stable",
            Classification::Marginal => "marginal",
            Classification::Unstable => "unstable",
        })
    }
}

pub fn classify(eigs: &[Complex<f64>], tol: f64) -> Classification {
    let d = dominant_real(eigs);
    if d < -tol {
        Classification::Stable
    } else if d.abs() <= tol {
        Classification::Marginal
    } else {
        Classification::Unstable
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    pub equilibrium: StateVector,
    pub eigenvalues: Vec<Complex<f64>>,
    pub classification: Classification,
    pub dominant_real: f64,
    pub method: &'static str,
}

pub fn stability_report(state: &StateVector, params: &Parameters) -> Result<StabilityReport> {
    let jac = jacobian(state, params)?;
    let eigs = eigenvalues(&jac)?;
    Ok(StabilityReport {
        equilibrium: *state,
        classification: classify(&eigs, TOL_EIG),
        dominant_real: dominant_real(&eigs),
        eigenvalues: eigs,
        method: "central differences + Richardson; Hessenberg/Francis QR",
    })
}

/// The removal rates `d1..d8` of the linearisation at the disease-free state.
pub fn removal_rates(p: &Parameters) -> [f64; 8] {
    let mu = p.mu;
    [
        p.k1 + p.tau1 + mu,
        p.tau2 + mu + p.d_t,
        p.rho1 + mu,
        p.alpha1 + mu + p.d_a,
        p.k2 + mu + p.tau4,
        p.rho2 + p.tau3 + mu + p.d_t,
        p.rho3 + mu,
        p.alpha2 + p.d_ta + mu,
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceDet {
    /// `−2μ − Σ dᵢ + β2Λ/(μN)`: the diagonal of the linearisation summed.
    pub trace_closed: f64,
    /// `−2μ − Σ dᵢ`, omitting the `β2Λ/(μN)` term on the `I_H` diagonal.
    pub trace_without_hiv_gain: f64,
    pub trace_numeric: f64,
    pub det: f64,
}

/// Trace and determinant of the Jacobian at the disease-free state.
pub fn dfe_trace_det(params: &Parameters) -> Result<TraceDet> {
    let n_ref = params.incidence.reference_population(params);
    let d: f64 = removal_rates(params).iter().sum();
    let base = -2.0 * params.mu - d;
    let gain = params.beta2 * params.lambda / (params.mu * n_ref);
    let jac = jacobian(&StateVector::disease_free(params), params)?;
    Ok(TraceDet {
        trace_closed: base + gain,
        trace_without_hiv_gain: base,
        trace_numeric: jac.trace(),
        det: jac.determinant(),
    })
}

/// Nonlinear remainder `Ĝ` of the infected subsystem, ordered
/// `L_T, I_T, I_H, A, L_TH, I_TH, R_TH, A_T`.
#[derive(Clone, Debug, PartialEq)]
pub struct H2Evaluation {
    pub state: StateVector,
    pub ghat: [f64; 8],
    /// 1-based positions of the negative components.
    pub violating: Vec<usize>,
}

impl H2Evaluation {
    pub fn holds(&self) -> bool {
        self.violating.is_empty()
    }
}

pub fn h2_condition_check(state: &StateVector, params: &Parameters) -> Result<H2Evaluation> {
    use Compartment::*;
    let foi = force_of_infection(state, params)?;
    let (lt, lh) = (foi.lambda_t, foi.lambda_h);
    let x = state;
    let n0 = params.dfe_population();
    let ghat = [
        lt * (n0 - x[S] - params.beta1p * x[RT]),
        -params.delta * lh * x[IT],
        lh * (n0 - x[S] - x[RT] - params.psi * x[IH]),
        0.0,
        -params.beta2p * lt * x[RTH],
        -(params.delta * lh * x[IT] + params.psi * lt * x[IH]),
        params.beta2p * lt * x[RTH],
        0.0,
    ];
    let violating = ghat
        .iter()
        .enumerate()
        .filter(|(_, &g)| g < 0.0)
        .map(|(i, _)| i + 1)
        .collect();
    Ok(H2Evaluation {
        state: *state,
        ghat,
        violating,
    })
}

const _: () = assert!(COMPARTMENTS == 10);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Incidence, REFERENCE_POPULATION};
    use crate::reproduction::{r1_closed, r2_closed};

    #[test]
    fn fd_jacobian_of_polynomial() {
        let f = |x: &[f64]| Ok(vec![x[0] * x[0] * x[1], x[1].sin()]);
        let j = fd_jacobian(f, &[3.0, 0.5]).unwrap();
        assert!((j[(0, 0)] - 3.0).abs() < 1e-8);
        assert!((j[(0, 1)] - 9.0).abs() < 1e-8);
        assert!(j[(1, 0)].abs() < 1e-12);
        assert!((j[(1, 1)] - 0.5f64.cos()).abs() < 1e-9);
    }

    #[test]
    fn dfe_jacobian_entries() {
        for inc in [Incidence::Total, Incidence::Constant(49_980.0)] {
            let p = Parameters::baseline(6.0, 0.1).with_incidence(inc);
            let j = jacobian(&StateVector::disease_free(&p), &p).unwrap();
            assert!((j[(0, 0)] + p.mu).abs() < 1e-9);
            assert!((j[(0, 2)] + 6.0).abs() < 1e-7, "{}", j[(0, 2)]);
            assert!((j[(1, 1)] + (p.k1 + p.tau1 + p.mu)).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_transmission_jacobian_is_the_linear_system() {
        let p = Parameters::baseline(0.0, 0.0);
        let x = StateVector::reference_initial(REFERENCE_POPULATION);
        let j = jacobian(&x, &p).unwrap();
        let d = removal_rates(&p);
        // Steps of 1e-6 on empty classes against rows of size ~1e4 leave
        // roundoff around 1e-6 in absolute terms.
        let tol = 1e-5;
        // diagonal: −μ on S and R_T, −dᵢ elsewhere (with −d3 on I_H)
        let diag = [-p.mu, -d[0], -d[1], -p.mu, -d[2], -d[3], -d[4], -d[5], -d[6], -d[7]];
        for (i, want) in diag.iter().enumerate() {
            assert!((j[(i, i)] - want).abs() < tol, "{i}");
        }
        assert!((j[(2, 1)] - p.k1).abs() < tol);
        assert!((j[(3, 1)] - p.tau1).abs() < tol);
        assert!((j[(4, 5)] - p.alpha1).abs() < tol);
        assert!((j[(9, 7)] - p.rho2).abs() < tol);
        assert!(j[(1, 2)].abs() < tol);
        // block-triangular: nothing flows from the TB block into the HIV block
        for r in 4..6 {
            for c in [1, 2, 3] {
                assert_eq!(j[(r, c)], 0.0);
            }
        }
    }

    #[test]
    fn directional_derivative_consistency() {
        let p = Parameters::baseline(6.0, 0.1).with_incidence(Incidence::Total);
        let x = StateVector::reference_initial(REFERENCE_POPULATION);
        let j = jacobian(&x, &p).unwrap();
        let u = nalgebra::DVector::from_fn(10, |i, _| ((i * 7 + 3) % 5) as f64 - 2.0).normalize();
        let h = 1e-3;
        let plus = StateVector(std::array::from_fn(|i| x.0[i] + h * u[i]));
        let minus = StateVector(std::array::from_fn(|i| x.0[i] - h * u[i]));
        let fp = full_rhs(&plus, &p).unwrap();
        let fm = full_rhs(&minus, &p).unwrap();
        let fd = nalgebra::DVector::from_fn(10, |i, _| (fp[i] - fm[i]) / (2.0 * h));
        assert!((&j * &u - fd).norm() < 1e-4 * j.norm());
    }

    #[test]
    fn classification_rules() {
        let c = |re: &[f64]| -> Vec<Complex<f64>> { re.iter().map(|&r| Complex::new(r, 0.0)).collect() };
        assert_eq!(classify(&c(&[-1.0, -0.5]), TOL_EIG), Classification::Stable);
        assert_eq!(classify(&c(&[-1.0, 0.3]), TOL_EIG), Classification::Unstable);
        assert_eq!(classify(&c(&[-1.0, 1e-9]), TOL_EIG), Classification::Marginal);
        assert_eq!(classify(&c(&[-1.0, -1e-9]), TOL_EIG), Classification::Marginal);
    }

    #[test]
    fn dfe_spectrum_follows_the_threshold() {
        let below = Parameters::baseline(2.7, 0.03);
        let r = stability_report(&StateVector::disease_free(&below), &below).unwrap();
        assert_eq!(r.classification, Classification::Stable);
        assert_eq!(r.eigenvalues.len(), 10);

        let above = Parameters::baseline(6.0, 0.1);
        let r = stability_report(&StateVector::disease_free(&above), &above).unwrap();
        assert_eq!(r.classification, Classification::Unstable);
    }

    #[test]
    fn trace_and_determinant_at_dfe() {
        let p = Parameters::baseline(2.7, 0.03).with_incidence(Incidence::Total);
        let td = dfe_trace_det(&p).unwrap();
        assert!(td.trace_closed < 0.0);
        assert!((td.trace_closed - td.trace_numeric).abs() < 1e-6 * td.trace_closed.abs());
        // the version without the I_H gain term is off by exactly β2
        assert!((td.trace_closed - td.trace_without_hiv_gain - 0.03).abs() < 1e-12);
        assert!(td.det > 0.0);

        // crossing R1 = 1 flips the sign of the determinant
        let q = p.clone().with_betas(6.0, 0.03);
        let n = q.dfe_population();
        assert!(r1_closed(&q, n) > 1.0 && r2_closed(&q, n) < 1.0);
        assert!(dfe_trace_det(&q).unwrap().det < 0.0);
    }

    #[test]
    fn trace_decreases_with_mu() {
        let mut last = f64::INFINITY;
        for mu in [0.01, 0.02, 0.05, 0.1, 0.5] {
            let mut p = Parameters::baseline(2.7, 0.03).with_incidence(Incidence::Total);
            p.mu = mu;
            let t = dfe_trace_det(&p).unwrap().trace_closed;
            assert!(t < last);
            last = t;
        }
    }

    #[test]
    fn h2_at_dfe_and_reference_state() {
        let p = Parameters::baseline(6.0, 0.1);
        let e = h2_condition_check(&StateVector::disease_free(&p), &p).unwrap();
        assert!(e.ghat.iter().all(|&g| g == 0.0));
        assert!(e.holds());

        let x = StateVector::reference_initial(p.dfe_population());
        let e = h2_condition_check(&x, &p).unwrap();
        assert_eq!(e.ghat[3], 0.0);
        assert_eq!(e.ghat[7], 0.0);
        // R_TH = 0 in the reference state, so the L_TH component vanishes too
        assert_eq!(e.violating, vec![2, 6]);
        assert_eq!(e.ghat[4], 0.0);
    }
}
