//! Property tests for the vector field, integrator, reproduction numbers,
//! eigenvalue routine and configuration format.

mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use syndemic::config::parse_config;
use syndemic::dynamics::{integrate, simulate, IntegratorOptions};
use syndemic::model::{full_rhs, population_balance, Incidence, Parameters, StateVector};
use syndemic::reproduction::{ngm_decomposition, r0};
use syndemic::stability::eigenvalues;

fn params_strategy() -> impl Strategy<Value = Parameters> {
    any::<u64>().prop_map(|seed| common::random_params(&mut ChaCha8Rng::seed_from_u64(seed), Incidence::Total))
}

fn state_strategy() -> impl Strategy<Value = StateVector> {
    any::<u64>().prop_map(|seed| common::random_state(&mut ChaCha8Rng::seed_from_u64(seed)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivative_sum_is_population_balance(p in params_strategy(), x in state_strategy()) {
        let d = full_rhs(&x, &p).unwrap();
        let scale = p.lambda + x.total() * (1.0 + p.beta1 + p.beta2);
        prop_assert!((d.iter().sum::<f64>() - population_balance(&x, &p)).abs() <= 1e-12 * scale);
    }

    #[test]
    fn empty_compartments_do_not_decrease(p in params_strategy(), x in state_strategy()) {
        // On the boundary every zero compartment has a nonnegative derivative.
        let d = full_rhs(&x, &p).unwrap();
        for (v, dv) in x.0.iter().zip(d) {
            if *v == 0.0 {
                prop_assert!(dv >= 0.0, "zero compartment with derivative {}", dv);
            }
        }
    }

    #[test]
    fn trajectories_stay_in_region(p in params_strategy(), x in state_strategy()) {
        let traj = simulate(&p, &x, 30.0, Some(vec![0.0, 10.0, 20.0, 30.0])).unwrap();
        let bound = x.total().max(p.dfe_population());
        for s in &traj.states {
            prop_assert!(s.is_nonnegative());
            prop_assert!(s.total() <= bound * (1.0 + 1e-6));
        }
    }

    #[test]
    fn reproduction_numbers_scale_inversely_with_reference(p in params_strategy(), c in 0.1f64..10.0) {
        let n = p.dfe_population();
        let (a, b) = (r0(&p, n), r0(&p, c * n));
        prop_assert!((a.r1 - c * b.r1).abs() <= 1e-12 * a.r1.max(1e-300));
        prop_assert!((a.r2 - c * b.r2).abs() <= 1e-12 * a.r2.max(1e-300));
        prop_assert_eq!(a.r0, a.r1.max(a.r2));
    }

    #[test]
    fn next_generation_radius_matches_closed_form(p in params_strategy()) {
        let r = r0(&p, p.dfe_population()).r0;
        let rho = ngm_decomposition(&p).unwrap().rho;
        prop_assert!((rho - r).abs() <= 1e-6 * r.max(1e-12), "rho {} vs {}", rho, r);
    }

    #[test]
    fn eigenvalues_preserve_trace_and_sort(n in 1usize..=10, seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-10.0..10.0));
        let e = eigenvalues(&m).unwrap();
        prop_assert_eq!(e.len(), n);
        let tr: f64 = e.iter().map(|z| z.re).sum();
        prop_assert!((tr - m.trace()).abs() <= 1e-9 * (1.0 + m.norm()));
        prop_assert!(e.windows(2).all(|w| w[0].re >= w[1].re));
        // Complex eigenvalues of a real matrix come in conjugate pairs.
        let im: f64 = e.iter().map(|z| z.im).sum();
        prop_assert!(im.abs() <= 1e-9 * (1.0 + m.norm()));
    }

    #[test]
    fn config_round_trips(p in params_strategy(), horizon in 0.1f64..500.0, fixed in proptest::option::of(1.0f64..1e6)) {
        let mut text = String::new();
        for name in Parameters::FIELD_NAMES {
            text.push_str(&format!("{name} = {}\n", p.get(name).unwrap()));
        }
        text.push_str(&format!("horizon = {horizon}\n"));
        if let Some(n) = fixed {
            text.push_str(&format!("incidence = {n}\n"));
        }
        let cfg = parse_config(&text).unwrap();
        prop_assert_eq!(cfg.params.beta1, p.beta1);
        prop_assert_eq!(parse_config(&cfg.to_config_string()).unwrap(), cfg);
    }
}

#[test]
fn integrator_matches_exponential_decay() {
    let k = [0.3, 1.7, 4.0];
    let sol = integrate(
        |_, y: &[f64; 3]| Ok([-k[0] * y[0], -k[1] * y[1], -k[2] * y[2]]),
        [1.0, 2.0, 3.0],
        0.0,
        5.0,
        &IntegratorOptions::new(1e-10, 1e-12),
    )
    .unwrap();
    let y = sol.states.last().unwrap();
    for i in 0..3 {
        let exact = (i as f64 + 1.0) * (-k[i] * 5.0).exp();
        assert!(
            (y[i] - exact).abs() < 1e-8 * (i as f64 + 1.0),
            "{i}: {} vs {exact}",
            y[i]
        );
    }
}

#[test]
fn total_population_without_disease_deaths_is_exact() {
    let p = Parameters::baseline(13.0, 0.06).without_disease_deaths();
    let x0 = StateVector::reference_initial(50_000.0);
    let traj = simulate(&p, &x0, 20.0, Some((0..=20).map(f64::from).collect())).unwrap();
    let eq = p.dfe_population();
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let exact = eq + (x0.total() - eq) * (-p.mu * t).exp();
        assert!((s.total() - exact).abs() < 1.0, "t = {t}");
    }
}
