//! Gibbs samplers for the prosecution-side parameters θ_s | e_s and the
//! defense-side parameters θ_a | e_a, plus chain diagnostics.

pub mod alternative;
pub mod drawset;
pub mod ess;
pub mod priors;
pub mod settings;
pub mod specific;

pub use alternative::{gibbs_alternative, gibbs_alternative_with, AlternativeHooks};
pub use drawset::{
    read_draw_table, AlternativeDraw, AlternativeDrawSet, Draw, DrawSet, DrawTable, Side,
    SpecificDraw, SpecificDrawSet,
};
pub use ess::{effective_sample_size, pooled_ess};
pub use priors::{AlternativePrior, SpecificPrior};
pub use settings::McmcSettings;
pub use specific::{gibbs_specific, gibbs_specific_with, SpecificHooks};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::stats::mvn::sample_mvn_raw;
use crate::stats::{RngStream, SpdMatrix};

/// Draw from the Gaussian full conditional with precision P = prior + data
/// precision and mean P⁻¹(prior term + data term).
pub(crate) fn conjugate_mean(
    prior_prec: &DMatrix<f64>,
    prior_term: &DVector<f64>,
    data_prec: &DMatrix<f64>,
    data_term: &DVector<f64>,
    rng: &mut RngStream,
) -> Result<DVector<f64>> {
    let prec = SpdMatrix::symmetrized(prior_prec + data_prec)?;
    let mean = prec.solve(&(prior_term + data_term));
    let cov = SpdMatrix::symmetrized(prec.inverse())?;
    Ok(sample_mvn_raw(&mean, &cov, rng))
}

pub(crate) fn sampler_error(iteration: usize, source: Error) -> Error {
    Error::Sampler {
        iteration,
        source: Box::new(source),
    }
}
