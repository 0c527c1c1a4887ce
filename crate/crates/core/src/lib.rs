//! Ten-compartment model of tuberculosis and HIV/AIDS coinfection.
//!
//! The population is split into susceptibles, the TB-only classes
//! (`L_T`, `I_T`, `R_T`), the HIV-only classes (`I_H`, `A`) and the
//! coinfected classes (`L_TH`, `I_TH`, `R_TH`, `A_T`). The crate provides
//!
//! * the vector field and parameter validation ([`model`]),
//! * adaptive Dormand–Prince integration with invariant monitoring
//!   ([`dynamics`]),
//! * closed-form and next-generation-matrix reproduction numbers
//!   ([`reproduction`]),
//! * the four equilibrium families by closed form and damped Newton
//!   ([`equilibria`]),
//! * Jacobian spectra, trace/determinant and centre-manifold bifurcation
//!   coefficients ([`stability`]),
//! * reproductions of the published experiments with pass/fail checks
//!   ([`scenarios`]),
//! * a `key = value` config format, SVG plots and a command-line front end
//!   ([`config`], [`svg`], [`cli`]).
//!
//! Each capability has a runnable example under `examples/`:
//!
//! | example | shows |
//! |---|---|
//! | `reproduction_numbers` | `R1`, `R2`, `R0` under both population conventions, NGM cross-check |
//! | `simulate` | 20-year run, invariant monitor, CSV + SVG output |
//! | `equilibria` | disease-free, TB-only, HIV-only and interior equilibria |
//! | `stability` | spectra and trace/determinant at the disease-free and interior states |
//! | `bifurcation` | `β*`, the null vectors and the coefficients `a`, `b` |
//! | `h2_condition` | sign check of the nonlinear remainder used in the global-stability argument |
//! | `treatment_impact` | treated vs untreated arms for the three treatment families |
//! | `sweep` | one-parameter sweeps |
//! | `config_file` | parsing and round-tripping a run configuration |
//! | `scenarios` | all published-experiment checks |
//!
//! ```
//! use syndemic::model::{Parameters, StateVector};
//! use syndemic::reproduction::r0;
//!
//! let p = Parameters::baseline(6.0, 0.1);
//! let r = r0(&p, p.dfe_population());
//! assert!((r.r1 - 1.39239).abs() < 5e-5);
//! let traj = syndemic::dynamics::simulate(&p, &StateVector::reference_initial(50_000.0), 1.0, None)?;
//! assert!(traj.terminal().is_nonnegative());
//! # Ok::<(), syndemic::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod dynamics;
pub mod equilibria;
pub mod error;
pub mod model;
pub mod output;
pub mod reproduction;
pub mod scenarios;
pub mod stability;
pub mod svg;

pub use error::{Error, Result};
