//! Reproduction numbers: closed forms and the next-generation matrix.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{force_of_infection, full_rhs, Compartment, Parameters, StateVector};
use crate::stability::{eigenvalues, fd_jacobian};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReproductionNumbers {
    pub r1: f64,
    pub r2: f64,
    pub r0: f64,
    /// Population in the `Λ/(Nμ)` prefactor.
    pub n_ref: f64,
}

/// TB reproduction number
/// `Λ/(Nμ) · β1/(dT+μ+τ2) · k1/(k1+τ1+μ)` with `N = n_ref`.
pub fn r1_closed(p: &Parameters, n_ref: f64) -> f64 {
    p.lambda / (n_ref * p.mu) * (p.beta1 / (p.d_t + p.mu + p.tau2)) * (p.k1 / (p.k1 + p.tau1 + p.mu))
}

/// HIV reproduction number
/// `Λ/(Nμ) · β2 (μ+α1+dA+ηρ1)/(μα1+(μ+ρ1)(μ+dA))` with `N = n_ref`.
pub fn r2_closed(p: &Parameters, n_ref: f64) -> f64 {
    p.lambda / (n_ref * p.mu) * p.beta2 * (p.mu + p.alpha1 + p.d_a + p.eta * p.rho1)
        / (p.mu * p.alpha1 + (p.mu + p.rho1) * (p.mu + p.d_a))
}

pub fn r0(p: &Parameters, n_ref: f64) -> ReproductionNumbers {
    let r1 = r1_closed(p, n_ref);
    let r2 = r2_closed(p, n_ref);
    ReproductionNumbers {
        r1,
        r2,
        r0: r1.max(r2),
        n_ref,
    }
}

/// Reproduction numbers at the population the model's incidence refers to
/// at the disease-free state.
pub fn r0_model(p: &Parameters) -> ReproductionNumbers {
    r0(p, p.incidence.reference_population(p))
}

/// Positions of the eight infected classes in the state vector.
pub const INFECTED_INDICES: [usize; 8] = [1, 2, 4, 5, 6, 7, 8, 9];

#[derive(Clone, Debug, PartialEq)]
pub struct NextGenDecomposition {
    pub infected: [Compartment; 8],
    /// New-infection matrix.
    pub f: DMatrix<f64>,
    /// Transition matrix.
    pub v: DMatrix<f64>,
    /// Spectral radius of `F·V⁻¹`.
    pub rho: f64,
}

/// New-infection inflows into the infected classes:
/// `λ_T S + β'1 λ_T R_T → L_T`, `λ_H (S + R_T) → I_H`,
/// `β'2 λ_T R_TH → L_TH`, `δ λ_H I_T + ψ λ_T I_H → I_TH`.
pub fn new_infections(state: &StateVector, p: &Parameters) -> Result<[f64; 8]> {
    use Compartment::*;
    let foi = force_of_infection(state, p)?;
    let (lt, lh) = (foi.lambda_t, foi.lambda_h);
    let x = state;
    Ok([
        lt * x[S] + p.beta1p * lt * x[RT],
        0.0,
        lh * (x[S] + x[RT]),
        0.0,
        p.beta2p * lt * x[RTH],
        p.delta * lh * x[IT] + p.psi * lt * x[IH],
        0.0,
        0.0,
    ])
}

/// Everything else: `𝓥 = 𝓕 − f` on the infected classes.
pub fn transitions(state: &StateVector, p: &Parameters) -> Result<[f64; 8]> {
    let f = full_rhs(state, p)?;
    let new = new_infections(state, p)?;
    Ok(std::array::from_fn(|k| new[k] - f[INFECTED_INDICES[k]]))
}

fn embed(p: &Parameters, z: &[f64]) -> StateVector {
    let mut x = StateVector::disease_free(p);
    for (k, &i) in INFECTED_INDICES.iter().enumerate() {
        x.0[i] = z[k];
    }
    x
}

pub fn ngm_decomposition(p: &Parameters) -> Result<NextGenDecomposition> {
    let z0 = [0.0; 8];
    let f = fd_jacobian(|z| Ok(new_infections(&embed(p, z), p)?.to_vec()), &z0)?;
    let v = fd_jacobian(|z| Ok(transitions(&embed(p, z), p)?.to_vec()), &z0)?;
    let v_inv = v
        .clone()
        .lu()
        .try_inverse()
        .ok_or(Error::SingularMatrix("transition matrix V"))?;
    let rho = spectral_radius(&(&f * v_inv))?;
    Ok(NextGenDecomposition {
        infected: [
            Compartment::LT,
            Compartment::IT,
            Compartment::IH,
            Compartment::A,
            Compartment::LTH,
            Compartment::ITH,
            Compartment::RTH,
            Compartment::AT,
        ],
        f,
        v,
        rho,
    })
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(m: &DMatrix<f64>) -> Result<f64> {
    Ok(eigenvalues(m)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Incidence;

    fn dfe_n(p: &Parameters) -> f64 {
        p.dfe_population()
    }

    #[test]
    fn published_r1_values() {
        for (b1, want) in [
            (4.3, 0.99788),
            (6.0, 1.39239),
            (10.0, 2.32065),
            (15.0, 3.48097),
            (50.0, 11.60326),
        ] {
            let p = Parameters::baseline(b1, 0.0);
            assert!((r1_closed(&p, dfe_n(&p)) - want).abs() < 5e-5, "β1 = {b1}");
        }
        let p = Parameters::baseline(2.7, 0.03);
        assert!((r1_closed(&p, 50_000.0) - 0.62632).abs() < 5e-5);
        assert!((r2_closed(&p, 50_000.0) - 0.55077).abs() < 5e-5);
    }

    #[test]
    fn published_r2_values() {
        for (b2, want) in [
            (0.051, 0.93669),
            (0.055, 1.01016),
            (0.07, 1.28566),
            (0.09, 1.65299),
            (0.099, 1.81829),
        ] {
            let p = Parameters::baseline(0.0, b2);
            assert!((r2_closed(&p, dfe_n(&p)) - want).abs() < 5e-5, "β2 = {b2}");
        }
        let p = Parameters::baseline(6.0, 0.1);
        assert!((r2_closed(&p, 50_000.0) - 1.83593).abs() < 5e-5);
        assert!((r2_closed(&p, dfe_n(&p)) - 1.83666).abs() < 5e-5);
    }

    #[test]
    fn r0_bundles_the_max() {
        let p = Parameters::baseline(6.0, 0.1);
        let r = r0(&p, dfe_n(&p));
        assert!((r.r1 - 1.39239).abs() < 5e-5);
        assert_eq!(r.r0, r.r2);
        let z = r0(&Parameters::baseline(0.0, 0.0), 49_980.0);
        assert_eq!((z.r1, z.r2, z.r0), (0.0, 0.0, 0.0));
    }

    #[test]
    fn linear_in_transmission() {
        let p = Parameters::baseline(1.0, 0.01);
        let q = Parameters::baseline(3.0, 0.05);
        let n = dfe_n(&p);
        assert!((r1_closed(&q, n) - 3.0 * r1_closed(&p, n)).abs() < 1e-14);
        assert!((r2_closed(&q, n) - 5.0 * r2_closed(&p, n)).abs() < 1e-14);
    }

    #[test]
    fn ngm_matches_closed_forms() {
        for inc in [
            Incidence::Total,
            Incidence::Constant(49_980.0),
            Incidence::Constant(50_000.0),
        ] {
            let p = Parameters::baseline(6.0, 0.1).with_incidence(inc);
            let ngm = ngm_decomposition(&p).unwrap();
            let want = r0_model(&p).r0;
            assert!(((ngm.rho - want) / want).abs() < 1e-8, "{inc:?}: {} vs {want}", ngm.rho);
            assert!(ngm.f.iter().all(|&v| v >= -1e-12));
        }
    }

    #[test]
    fn ngm_without_transmission() {
        let p = Parameters::baseline(0.0, 0.0);
        let ngm = ngm_decomposition(&p).unwrap();
        assert!(ngm.f.iter().all(|&v| v == 0.0));
        assert_eq!(ngm.rho, 0.0);
    }

    #[test]
    fn singular_transitions_are_reported() {
        let mut p = Parameters::baseline(6.0, 0.1);
        p.mu = 0.0;
        p.lambda = 0.0;
        assert!(ngm_decomposition(&p).is_err());
    }

    #[test]
    fn splitting_reproduces_the_infected_jacobian() {
        let p = Parameters::baseline(6.0, 0.1).with_incidence(Incidence::Total);
        let ngm = ngm_decomposition(&p).unwrap();
        let jac = crate::stability::jacobian(&StateVector::disease_free(&p), &p).unwrap();
        for (a, &i) in INFECTED_INDICES.iter().enumerate() {
            for (b, &j) in INFECTED_INDICES.iter().enumerate() {
                let split = ngm.f[(a, b)] - ngm.v[(a, b)];
                assert!((split - jac[(i, j)]).abs() < 1e-7, "({i},{j})");
            }
        }
    }

    #[test]
    fn spectral_radius_examples() {
        assert_eq!(spectral_radius(&DMatrix::identity(3, 3)).unwrap(), 1.0);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, -5.0]));
        assert_eq!(spectral_radius(&d).unwrap(), 5.0);
        let s = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!((spectral_radius(&s).unwrap() - 1.0).abs() < 1e-15);
        let mut bad = DMatrix::identity(2, 2);
        bad[(0, 0)] = f64::INFINITY;
        assert!(spectral_radius(&bad).is_err());
    }
}
