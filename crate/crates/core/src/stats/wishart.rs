use nalgebra::DMatrix;

use super::linalg::SpdMatrix;
use super::rng::RngStream;
use crate::error::{Error, Result};

/// Draw Σ ~ W⁻¹(Φ, ν) with density ∝ |Σ|^{-(ν+k+1)/2} exp(-½ tr(Φ Σ⁻¹)).
///
/// Σ⁻¹ is Wishart(Φ⁻¹, ν) and is built by the Bartlett decomposition
/// W = (L A)(L A)ᵀ with L Lᵀ = Φ⁻¹, A lower triangular,
/// A_ii² ~ χ²(ν - i) (i from 0) and N(0, 1) below the diagonal. The draw is
/// then Σ = T⁻ᵀ T⁻¹ with T = L A, so no general inverse is taken.
pub fn sample_inverse_wishart(phi: &SpdMatrix, nu: f64, rng: &mut RngStream) -> Result<SpdMatrix> {
    let k = phi.dim();
    check_df(nu, k)?;
    let l = SpdMatrix::symmetrized(phi.inverse())?.cholesky_factor();
    let a = bartlett_factor(k, nu, rng);
    let t = l * a;
    let t_inv = t
        .solve_lower_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::NotPositiveDefinite {
            context: "singular Bartlett factor".into(),
        })?;
    SpdMatrix::symmetrized(t_inv.transpose() * t_inv).map_err(|_| Error::NotPositiveDefinite {
        context: "inverse-Wishart draw".into(),
    })
}

/// Draw W ~ Wishart(scale, ν), E[W] = ν · scale.
pub fn sample_wishart(scale: &SpdMatrix, nu: f64, rng: &mut RngStream) -> Result<SpdMatrix> {
    let k = scale.dim();
    check_df(nu, k)?;
    let t = scale.cholesky_factor() * bartlett_factor(k, nu, rng);
    SpdMatrix::symmetrized(&t * t.transpose())
}

fn check_df(nu: f64, k: usize) -> Result<()> {
    if !nu.is_finite() || nu <= k as f64 - 1.0 {
        return Err(Error::InvalidDegreesOfFreedom { nu, k });
    }
    Ok(())
}

fn bartlett_factor(k: usize, nu: f64, rng: &mut RngStream) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(k, k);
    for i in 0..k {
        a[(i, i)] = rng.chi_squared(nu - i as f64).sqrt();
        for j in 0..i {
            a[(i, j)] = rng.standard_normal();
        }
    }
    a
}
