use std::f64::consts::PI;

use nalgebra::DVector;

use super::linalg::{check_dim, MeanVector, SpdMatrix};
use super::rng::RngStream;
use crate::error::Result;

/// log N(x; mu, sigma) through the cached Cholesky factor.
pub fn mvn_logpdf(x: &MeanVector, mu: &MeanVector, sigma: &SpdMatrix) -> Result<f64> {
    check_dim(sigma.dim(), x.dim())?;
    check_dim(sigma.dim(), mu.dim())?;
    Ok(mvn_logpdf_unchecked(x.as_vector(), mu.as_vector(), sigma))
}

pub(crate) fn mvn_logpdf_unchecked(x: &DVector<f64>, mu: &DVector<f64>, sigma: &SpdMatrix) -> f64 {
    let k = x.len() as f64;
    let diff = x - mu;
    -0.5 * (k * (2.0 * PI).ln() + sigma.log_det() + sigma.mahalanobis_sq(&diff))
}

/// One draw from MVN(mu, sigma): mu + L z with z standard normal.
pub fn sample_mvn(mu: &MeanVector, sigma: &SpdMatrix, rng: &mut RngStream) -> Result<MeanVector> {
    check_dim(sigma.dim(), mu.dim())?;
    MeanVector::new(sample_mvn_raw(mu.as_vector(), sigma, rng))
}

pub(crate) fn sample_mvn_raw(mu: &DVector<f64>, sigma: &SpdMatrix, rng: &mut RngStream) -> DVector<f64> {
    let z = DVector::from_fn(mu.len(), |_, _| rng.standard_normal());
    mu + sigma.cholesky_factor() * z
}
