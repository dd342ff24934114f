//! Joint density of fragments that share one latent source effect.
//!
//! Under y_j = μ + a + w_j with a ~ N(0, Σ_b) and w_j ~ N(0, Σ_w), the stacked
//! vector (y_1, ..., y_m) is N(μ_c, Σ_c) where μ_c repeats μ and Σ_c has
//! Σ_b + Σ_w on its diagonal blocks and Σ_b off the diagonal.

use nalgebra::{DMatrix, DVector};

use super::linalg::{check_dim, MeanVector, SpdMatrix};
use super::mvn::mvn_logpdf_unchecked;
use crate::error::{Error, Result};

/// Default cap on the stacked dimension mk.
pub const DEFAULT_MAX_STACKED_DIM: usize = 512;

pub fn compound_logpdf(
    fragments: &[MeanVector],
    mu: &MeanVector,
    sigma_b: &SpdMatrix,
    sigma_w: &SpdMatrix,
) -> Result<f64> {
    compound_logpdf_capped(fragments, mu, sigma_b, sigma_w, DEFAULT_MAX_STACKED_DIM)
}

pub fn compound_logpdf_capped(
    fragments: &[MeanVector],
    mu: &MeanVector,
    sigma_b: &SpdMatrix,
    sigma_w: &SpdMatrix,
    max_stacked_dim: usize,
) -> Result<f64> {
    if fragments.is_empty() {
        return Err(Error::EmptyInput("fragments"));
    }
    let k = mu.dim();
    check_dim(k, sigma_b.dim())?;
    check_dim(k, sigma_w.dim())?;
    for f in fragments {
        check_dim(k, f.dim())?;
    }
    let m = fragments.len();
    let size = m * k;
    if size > max_stacked_dim {
        return Err(Error::StructureTooLarge {
            size,
            cap: max_stacked_dim,
        });
    }

    // Σ_c is invariant under block permutation, so evaluate in a canonical
    // fragment order; the result is then bit-identical for any input order.
    let mut ordered: Vec<&MeanVector> = fragments.iter().collect();
    ordered.sort_by(|a, b| a.canonical_cmp(b));

    let stacked = DVector::from_iterator(size, ordered.iter().flat_map(|f| f.iter().copied()));
    let mean = DVector::from_iterator(size, (0..m).flat_map(|_| mu.iter().copied()));
    let cov = compound_covariance(m, sigma_b.matrix(), sigma_w.matrix());
    let cov = SpdMatrix::symmetrized(cov).map_err(|_| Error::NotPositiveDefinite {
        context: format!("compound covariance ({size} x {size})"),
    })?;
    Ok(mvn_logpdf_unchecked(&stacked, &mean, &cov))
}

/// Dense mk × mk block matrix with Σ_b + Σ_w diagonal blocks and Σ_b elsewhere.
pub fn compound_covariance(m: usize, sigma_b: &DMatrix<f64>, sigma_w: &DMatrix<f64>) -> DMatrix<f64> {
    let k = sigma_b.nrows();
    let mut cov = DMatrix::zeros(m * k, m * k);
    for bi in 0..m {
        for bj in 0..m {
            let mut block = cov.view_mut((bi * k, bj * k), (k, k));
            block.copy_from(sigma_b);
            if bi == bj {
                block += sigma_w;
            }
        }
    }
    cov
}
