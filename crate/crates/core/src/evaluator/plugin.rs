use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::samplers::alternative::canonical_groups;
use crate::stats::linalg::{check_dim, clamp_eigenvalues};
use crate::stats::{MeanVector, SpdMatrix};

/// Eigenvalue floor for repairing method-of-moments covariance estimates.
pub const EIGENVALUE_FLOOR: f64 = 1e-8;

/// Method-of-moments estimate of (μ_a, Σ_b, Σ_w) from a balanced design.
#[derive(Debug, Clone, PartialEq)]
pub struct AltPlugInEstimate {
    pub mu_hat: MeanVector,
    pub sigma_w_hat: SpdMatrix,
    pub sigma_b_hat: SpdMatrix,
    /// Estimates before eigenvalue repair.
    pub raw_sigma_w: DMatrix<f64>,
    pub raw_sigma_b: DMatrix<f64>,
    /// True iff either covariance needed repair.
    pub clamped: bool,
    /// Smallest eigenvalue over both raw estimates.
    pub min_eigenvalue_before_repair: f64,
}

fn repair(raw: &DMatrix<f64>) -> Result<(SpdMatrix, f64, bool)> {
    let (repaired, min) = clamp_eigenvalues(raw, EIGENVALUE_FLOOR);
    if min >= EIGENVALUE_FLOOR {
        if let Ok(s) = SpdMatrix::symmetrized(raw.clone()) {
            return Ok((s, min, false));
        }
    }
    Ok((SpdMatrix::symmetrized(repaired)?, min, true))
}

/// μ̂ = grand mean; Σ̂_w = pooled within scatter / (n(m-1));
/// Σ̂_b = between-mean scatter / (n-1) - Σ̂_w / m.
pub fn plugin_estimates(e_a: &[Vec<MeanVector>]) -> Result<AltPlugInEstimate> {
    let n = e_a.len();
    if n < 2 {
        return Err(Error::TooFewSources(n));
    }
    let sizes: Vec<usize> = e_a.iter().map(Vec::len).collect();
    let (min, max) = (
        *sizes.iter().min().expect("n >= 2"),
        *sizes.iter().max().expect("n >= 2"),
    );
    if min != max {
        return Err(Error::Unbalanced { min, max });
    }
    let m = min;
    if m == 0 {
        return Err(Error::EmptyInput("alternative source without fragments"));
    }
    if m == 1 {
        return Err(Error::SingleFragmentSources);
    }
    let k = e_a[0][0].dim();
    for y in e_a.iter().flatten() {
        check_dim(k, y.dim())?;
    }
    let groups = canonical_groups(e_a);

    let means: Vec<DVector<f64>> = groups
        .iter()
        .map(|g| g.iter().fold(DVector::zeros(k), |acc, y| acc + y.as_vector()) / m as f64)
        .collect();
    let total = groups
        .iter()
        .flatten()
        .fold(DVector::zeros(k), |acc, y| acc + y.as_vector());
    let mu_hat = total / (m * n) as f64;

    let mut within = DMatrix::zeros(k, k);
    for (g, ybar) in groups.iter().zip(&means) {
        for y in g {
            let d = y.as_vector() - ybar;
            within += &d * d.transpose();
        }
    }
    let raw_sigma_w = within / (n * (m - 1)) as f64;

    let mut between = DMatrix::zeros(k, k);
    for ybar in &means {
        let d = ybar - &mu_hat;
        between += &d * d.transpose();
    }
    let raw_sigma_b = between / (n - 1) as f64 - &raw_sigma_w / m as f64;

    let (sigma_w_hat, min_w, clamped_w) = repair(&raw_sigma_w)?;
    let (sigma_b_hat, min_b, clamped_b) = repair(&raw_sigma_b)?;
    Ok(AltPlugInEstimate {
        mu_hat: MeanVector::new(mu_hat)?,
        sigma_w_hat,
        sigma_b_hat,
        raw_sigma_w,
        raw_sigma_b,
        clamped: clamped_w || clamped_b,
        min_eigenvalue_before_repair: min_w.min(min_b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1(xs: &[f64]) -> Vec<MeanVector> {
        xs.iter().map(|x| MeanVector::from_slice(&[*x]).unwrap()).collect()
    }

    #[test]
    fn hand_computed_univariate() {
        let est = plugin_estimates(&[g1(&[0.0, 2.0]), g1(&[4.0, 6.0])]).unwrap();
        assert_eq!(est.mu_hat[0], 3.0);
        assert_eq!(est.sigma_w_hat.matrix()[(0, 0)], 2.0);
        assert_eq!(est.sigma_b_hat.matrix()[(0, 0)], 7.0);
        assert!(!est.clamped);
    }

    #[test]
    fn negative_between_is_clamped() {
        let est = plugin_estimates(&[g1(&[0.0, 10.0]), g1(&[1.0, 9.0])]).unwrap();
        assert!(est.raw_sigma_b[(0, 0)] < 0.0);
        assert_eq!(est.raw_sigma_b[(0, 0)], -20.5);
        assert!(est.clamped);
        assert_eq!(est.min_eigenvalue_before_repair, -20.5);
        assert!((est.sigma_b_hat.matrix()[(0, 0)] - EIGENVALUE_FLOOR).abs() < 1e-20);
    }

    #[test]
    fn identical_fragments() {
        let y = MeanVector::from_slice(&[1.5, -2.0]).unwrap();
        let groups = vec![vec![y.clone(); 3]; 4];
        let est = plugin_estimates(&groups).unwrap();
        assert_eq!(est.mu_hat, y);
        assert!(est.clamped);
        let eps = DMatrix::identity(2, 2) * EIGENVALUE_FLOOR;
        assert!((est.sigma_w_hat.matrix() - &eps).amax() < 1e-20);
        assert!((est.sigma_b_hat.matrix() - &eps).amax() < 1e-20);
    }

    #[test]
    fn unbalanced_rejected() {
        let r = plugin_estimates(&[g1(&[0.0, 2.0]), g1(&[4.0, 6.0, 5.0])]);
        assert!(matches!(r, Err(Error::Unbalanced { min: 2, max: 3 })));
    }

    #[test]
    fn single_fragment_sources_rejected() {
        let r = plugin_estimates(&[g1(&[0.0]), g1(&[4.0])]);
        assert!(matches!(r, Err(Error::SingleFragmentSources)));
    }
}
