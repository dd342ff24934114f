//! Closed-form posterior predictive for the specific source when its
//! covariance is known, used to check the Monte Carlo machinery.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::stats::linalg::check_dim;
use crate::stats::{mvn_logpdf, MeanVector, SpdMatrix};

/// Conjugate posterior (μ_n, Λ_n) of a normal mean with known covariance:
/// Λ_n = (Λ0⁻¹ + mσ⁻¹)⁻¹, μ_n = Λ_n (Λ0⁻¹ μ0 + σ⁻¹ Σ y).
pub fn conjugate_posterior(
    e_s: &[MeanVector],
    mu0: &MeanVector,
    lambda0: &SpdMatrix,
    sigma: &SpdMatrix,
) -> Result<(DVector<f64>, SpdMatrix)> {
    let k = mu0.dim();
    check_dim(k, lambda0.dim())?;
    check_dim(k, sigma.dim())?;
    let mut sum = DVector::zeros(k);
    for y in e_s {
        check_dim(k, y.dim())?;
        sum += y.as_vector();
    }
    let sigma_inv = sigma.inverse();
    let lambda0_inv = lambda0.inverse();
    let prec = SpdMatrix::symmetrized(&lambda0_inv + &sigma_inv * e_s.len() as f64)?;
    let lambda_n = SpdMatrix::symmetrized(prec.inverse())?;
    let mu_n = lambda_n.matrix() * (lambda0_inv * mu0.as_vector() + sigma_inv * sum);
    Ok((mu_n, lambda_n))
}

/// log ∫ Π_j N(y_j; μ, σ) N(μ; μ_n, Λ_n) dμ, evaluated as one MVN over the
/// stacked trace with covariance I⊗σ + J⊗Λ_n.
pub fn closed_form_predictive_known_cov(
    e_u: &[MeanVector],
    e_s: &[MeanVector],
    mu0: &MeanVector,
    lambda0: &SpdMatrix,
    sigma: &SpdMatrix,
) -> Result<f64> {
    if e_u.is_empty() {
        return Err(Error::EmptyInput("e_u"));
    }
    let k = mu0.dim();
    for y in e_u {
        check_dim(k, y.dim())?;
    }
    let (mu_n, lambda_n) = conjugate_posterior(e_s, mu0, lambda0, sigma)?;
    let m = e_u.len();
    let ones = DMatrix::from_element(m, m, 1.0);
    let cov = DMatrix::<f64>::identity(m, m).kronecker(sigma.matrix())
        + ones.kronecker(lambda_n.matrix());
    let stacked = DVector::from_iterator(m * k, e_u.iter().flat_map(|y| y.iter().copied()));
    let mean = DVector::from_iterator(m * k, (0..m).flat_map(|_| mu_n.iter().copied()));
    mvn_logpdf(
        &MeanVector::new(stacked)?,
        &MeanVector::new(mean)?,
        &SpdMatrix::symmetrized(cov)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> MeanVector {
        MeanVector::from_slice(x).unwrap()
    }

    #[test]
    fn univariate_example() {
        let lp = closed_form_predictive_known_cov(
            &[v(&[0.0])],
            &[v(&[0.0])],
            &v(&[0.0]),
            &SpdMatrix::identity(1),
            &SpdMatrix::identity(1),
        )
        .unwrap();
        let expected = -0.5 * (2.0 * std::f64::consts::PI * 1.5).ln();
        assert!((lp - expected).abs() < 1e-12);
        assert!((lp - -1.1216711).abs() < 1e-7);
    }

    #[test]
    fn dogmatic_prior_limit() {
        let mu0 = v(&[0.3, -0.2]);
        let sigma = SpdMatrix::new(nalgebra::dmatrix![1.0, 0.2; 0.2, 0.5]).unwrap();
        let e_u = vec![v(&[0.1, 0.4]), v(&[1.0, -1.0])];
        let e_s = vec![v(&[5.0, 5.0]), v(&[6.0, 4.0])];
        let lp = closed_form_predictive_known_cov(
            &e_u,
            &e_s,
            &mu0,
            &SpdMatrix::scaled_identity(2, 1e-12),
            &sigma,
        )
        .unwrap();
        let iid: f64 = e_u.iter().map(|y| mvn_logpdf(y, &mu0, &sigma).unwrap()).sum();
        assert!((lp - iid).abs() < 1e-6, "{lp} vs {iid}");
    }
}
