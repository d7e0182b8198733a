//! Bayesian estimation of a rotation angle with entangled two-qubit probes.
//!
//! The crate is layered bottom-up:
//!
//! - [`quantum`]: probe states, the rotation, dephasing, outcome probabilities.
//! - [`bayes`]: grid posteriors, most probable angle, shortest credible interval.
//! - [`ensemble`]: seeded Monte Carlo ensembles and parameter sweeps.
//! - [`config`], [`report`], [`cli`]: the `qmetro` front end (config files,
//!   CSV tables, SVG plots).

pub mod bayes;
pub mod cli;
pub mod config;
pub mod ensemble;
pub mod error;
pub mod quantum;
pub mod report;

pub use error::{Error, Result};
