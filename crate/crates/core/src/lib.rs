//! Value of evidence for the specific-source identification problem.
//!
//! The trace `e_u`, the specific-source sample `e_s` and the alternative
//! population sample `e_a` are evaluated two ways:
//!
//! * plug-in: alternative-population parameters fixed at method-of-moments
//!   estimates, `V = π(e_u | e_s, M_p) / f(e_u | θ̂_a)`;
//! * full Bayes: those parameters carry a prior updated by `e_a`,
//!   `V = π(e_u | e_s, M_p) / π(e_u | e_a, M_d)`.
//!
//! Posterior predictive densities are Monte Carlo averages over Gibbs draws.

pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod evaluator;
pub mod evidence;
pub mod samplers;
pub mod simulator;
pub mod stats;
pub mod text;

pub use error::{Error, ErrorCategory, Result};
