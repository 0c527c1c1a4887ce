#![allow(dead_code)]

use rand::Rng;
use syndemic::model::{Incidence, Parameters, StateVector, COMPARTMENTS};

/// A parameter set satisfying every validation constraint, with rates drawn
/// from ranges around the baseline values.
pub fn random_params<R: Rng>(rng: &mut R, incidence: Incidence) -> Parameters {
    let mut p = Parameters::baseline(rng.random_range(0.0..20.0), rng.random_range(0.0..0.5));
    p.lambda = rng.random_range(50.0..2000.0);
    p.mu = rng.random_range(0.005..0.05);
    p.beta1p = rng.random_range(0.0..=1.0);
    p.beta2p = rng.random_range(1.0..2.0);
    for name in ["k1", "k2", "tau1", "tau2", "tau3", "tau4", "alpha1", "alpha2"] {
        p.set(name, rng.random_range(0.0..3.0)).unwrap();
    }
    for name in ["rho1", "rho2", "rho3"] {
        p.set(name, rng.random_range(0.01..1.0)).unwrap();
    }
    for name in ["psi", "delta", "eta"] {
        p.set(name, rng.random_range(1.0..2.0)).unwrap();
    }
    for name in ["dT", "dA", "dTA"] {
        p.set(name, rng.random_range(0.0..1.0)).unwrap();
    }
    p.incidence = incidence;
    p.validate().expect("sampled parameters are valid");
    p
}

/// Nonnegative state with total in `[1, 1e5]`.
pub fn random_state<R: Rng>(rng: &mut R) -> StateVector {
    let total = 10f64.powf(rng.random_range(0.0..5.0));
    let mut w = [0.0; COMPARTMENTS];
    for v in &mut w {
        // Some compartments exactly empty, as on the boundary of the region.
        *v = if rng.random_bool(0.2) {
            0.0
        } else {
            rng.random_range(0.0..1.0)
        };
    }
    w[0] += 1e-3;
    let sum: f64 = w.iter().sum();
    StateVector(w.map(|v| v / sum * total))
}

/// The (β1, β2) pairs used in the published experiments.
pub const PUBLISHED_BETAS: [(f64, f64); 13] = [
    (6.0, 0.1),
    (2.7, 0.03),
    (13.0, 0.06),
    (4.3, 0.0),
    (10.0, 0.0),
    (15.0, 0.0),
    (50.0, 0.0),
    (0.0, 0.051),
    (0.0, 0.055),
    (0.0, 0.07),
    (0.0, 0.09),
    (0.0, 0.099),
    (6.0, 0.0),
];
