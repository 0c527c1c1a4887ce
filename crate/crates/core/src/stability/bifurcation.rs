//! Center-manifold analysis of the HIV-only sub-model at `R2 = 1`.
//!
//! The sub-model on `(S, I_H, A)` with `N_H = S + I_H + A` has a simple zero
//! eigenvalue at its disease-free state when `β2 = β*`. The signs of the
//! coefficients `a` and `b` decide the direction of the bifurcation; `a < 0`
//! and `b > 0` give a forward bifurcation with a locally stable endemic
//! branch.

use nalgebra::{Complex, DMatrix, Matrix3, Vector3};

use super::eigen::eigenvalues;
use crate::error::{Error, Result};
use crate::model::{hiv_submodel_rhs, Incidence, Parameters};

#[derive(Clone, Debug, PartialEq)]
pub struct BifurcationReport {
    pub beta_star: f64,
    pub jacobian: Matrix3<f64>,
    pub eigenvalues: Vec<Complex<f64>>,
    /// Right null vector, unit length with `w3 > 0`.
    pub w: Vector3<f64>,
    /// Left null vector with `v3 > 0` and `v·w = 1`.
    pub v: Vector3<f64>,
    /// Null vectors from the explicit component formulas, same normalisation.
    pub w_formula: Vector3<f64>,
    pub v_formula: Vector3<f64>,
    /// From the table of second partial derivatives.
    pub a: f64,
    /// From a second directional difference of the sub-model right-hand side.
    pub a_fd: f64,
    /// Simplified closed form as usually quoted; its mixed term lacks a
    /// factor 2 and so it does not equal `a`.
    pub a_simplified: f64,
    pub b: f64,
    pub b_fd: f64,
    pub b_simplified: f64,
    /// Smallest eigenvalue modulus of the Jacobian at `β*`.
    pub zero_eigenvalue_residual: f64,
    pub right_residual: f64,
    pub left_residual: f64,
}

/// `(μα1 + (μ+ρ1)(μ+dA)) / (α1 + dA + μ + ηρ1)`, the `β2` at which `R2 = 1`
/// with prefactor one.
pub fn beta_star(p: &Parameters) -> f64 {
    (p.mu * p.alpha1 + (p.mu + p.rho1) * (p.mu + p.d_a)) / (p.alpha1 + p.d_a + p.mu + p.eta * p.rho1)
}

/// Hand-coded Jacobian of the HIV sub-model at `(Λ/μ, 0, 0)` for a given `β2`.
pub fn hiv_dfe_jacobian(p: &Parameters, beta2: f64) -> Matrix3<f64> {
    Matrix3::new(
        -p.mu,
        -beta2,
        -beta2 * p.eta,
        0.0,
        beta2 - p.rho1 - p.mu,
        beta2 * p.eta + p.alpha1,
        0.0,
        p.rho1,
        -p.alpha1 - p.d_a - p.mu,
    )
}

fn normalise(w: Vector3<f64>, v: Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let w = if w[2] < 0.0 { -w } else { w }.normalize();
    let v = if v[2] < 0.0 { -v } else { v };
    let v = v / v.dot(&w);
    (w, v)
}

pub fn bifurcation_analysis(params: &Parameters) -> Result<BifurcationReport> {
    let p = params.clone().with_incidence(Incidence::Total);
    if !(p.rho1 > 0.0) {
        return Err(Error::InvalidArgument("bifurcation analysis needs rho1 > 0".into()));
    }
    p.validate()?;
    let bs = beta_star(&p);
    let jac = hiv_dfe_jacobian(&p, bs);

    let svd = jac.svd(true, true);
    let (u, vt) = match (svd.u, svd.v_t) {
        (Some(u), Some(vt)) => (u, vt),
        _ => return Err(Error::SingularMatrix("SVD of sub-model Jacobian")),
    };
    let k = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(2);
    let (w, v) = normalise(vt.row(k).transpose(), u.column(k).into_owned());

    let w_formula = Vector3::new(
        -(p.mu * p.alpha1 + (p.mu + p.rho1) * (p.mu + p.d_a)) / (p.rho1 * p.mu),
        (p.alpha1 + p.d_a + p.mu) / p.rho1,
        1.0,
    );
    let v_formula = Vector3::new(
        0.0,
        (p.alpha1 + p.d_a + p.mu + p.eta * p.rho1) / (p.alpha1 + p.eta * p.rho1 + p.mu * p.eta),
        1.0,
    );
    let (w_formula, v_formula) = normalise(w_formula, v_formula);

    // Second derivatives of f1 and f2 at the disease-free state; f3 is linear.
    let c = bs * p.mu / p.lambda;
    let h1 = Matrix3::new(
        0.0,
        0.0,
        0.0,
        0.0,
        2.0 * c,
        c * (1.0 + p.eta),
        0.0,
        c * (1.0 + p.eta),
        2.0 * c * p.eta,
    );
    let hessians = [h1, -h1, Matrix3::zeros()];
    let a: f64 = (0..3).map(|k| v[k] * w.dot(&(hessians[k] * w))).sum();

    // ∂²f/∂x∂β2 at the disease-free state: rows 1 and 2 only.
    let gb = Vector3::new(0.0, 1.0, p.eta);
    let b = -v[0] * gb.dot(&w) + v[1] * gb.dot(&w);

    let (a_fd, b_fd) = finite_difference_coefficients(&p, bs, &w, &v)?;

    // Simplified forms with k = α1 + dA.
    let kk = p.alpha1 + p.d_a;
    let (v3, w3) = (v[2], w[2]);
    let den = p.alpha1 + p.eta * p.rho1 + p.mu * p.eta;
    let a_simplified = -v3
        * w3
        * w3
        * bs
        * p.mu
        * (kk + p.mu + p.eta * p.rho1)
        * (2.0 * kk * kk
            + 4.0 * p.mu * kk
            + 2.0 * p.mu * p.mu
            + p.rho1 * (p.alpha1 + p.eta * (p.alpha1 + p.mu + 2.0 * p.rho1) + p.d_a * (1.0 + p.eta) + p.mu))
        / (p.rho1 * p.rho1 * p.lambda * den);
    let b_simplified = v3 * w3 * (kk + p.mu + p.eta * p.rho1) * (kk + p.mu) / (den * p.rho1)
        + p.eta * v3 * w3 * (kk + p.mu + p.eta * p.rho1) / den;

    let dyn_jac = DMatrix::from_iterator(3, 3, jac.iter().copied());
    let eigs = eigenvalues(&dyn_jac)?;
    let zero_eigenvalue_residual = eigs.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);

    Ok(BifurcationReport {
        beta_star: bs,
        jacobian: jac,
        eigenvalues: eigs,
        right_residual: (jac * w).norm(),
        left_residual: (jac.transpose() * v).norm(),
        w,
        v,
        w_formula,
        v_formula,
        a,
        a_fd,
        a_simplified,
        b,
        b_fd,
        b_simplified,
        zero_eigenvalue_residual,
    })
}

/// `a` and `b` from differences of the sub-model right-hand side along `w`,
/// each with one Richardson level.
fn finite_difference_coefficients(p: &Parameters, bs: f64, w: &Vector3<f64>, v: &Vector3<f64>) -> Result<(f64, f64)> {
    let x0 = Vector3::new(p.dfe_population(), 0.0, 0.0);
    let g = |t: f64, beta2: f64| -> Result<f64> {
        let mut q = p.clone();
        q.beta2 = beta2;
        let x = x0 + w * t;
        let f = hiv_submodel_rhs(&[x[0], x[1], x[2]], &q)?;
        Ok(v.dot(&Vector3::from(f)))
    };
    let h = 1e-3 * x0[0];

    let second = |h: f64| -> Result<f64> { Ok((g(h, bs)? - 2.0 * g(0.0, bs)? + g(-h, bs)?) / (h * h)) };
    let a_fd = (4.0 * second(h / 2.0)? - second(h)?) / 3.0;

    // f is affine in β2, so any finite β step is exact in that direction.
    let db = 0.1 * bs;
    let mixed = |h: f64| -> Result<f64> {
        Ok((g(h, bs + db)? - g(-h, bs + db)? - g(h, bs - db)? + g(-h, bs - db)?) / (4.0 * h * db))
    };
    let b_fd = (4.0 * mixed(h / 2.0)? - mixed(h)?) / 3.0;
    Ok((a_fd, b_fd))
}
