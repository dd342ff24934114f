use crate::error::{Error, Result};
use crate::stats::linalg::check_dim;
use crate::stats::{MeanVector, SpdMatrix};

/// Prior scale of the within-source covariances used for the glass data:
/// the approximate measurement precision of log(Ca/K), log(Ca/Si), log(Ca/Fe).
pub const GLASS_WITHIN_SCALE: [f64; 3] = [0.01, 0.00005, 0.0005];
pub const GLASS_MEAN_PRIOR_VARIANCE: f64 = 3000.0;
pub const GLASS_DEGREES_OF_FREEDOM: f64 = 3.0;

fn check_df(nu: f64, k: usize) -> Result<()> {
    if !nu.is_finite() || nu <= k as f64 - 1.0 {
        return Err(Error::InvalidDegreesOfFreedom { nu, k });
    }
    Ok(())
}

/// Prior on θ_s = (μ_s, Σ_s): μ_s ~ N(mu0, lambda0), Σ_s ~ W⁻¹(phi, nu).
#[derive(Debug, Clone, PartialEq)]
pub struct SpecificPrior {
    pub mu0: MeanVector,
    pub lambda0: SpdMatrix,
    pub phi: SpdMatrix,
    pub nu: f64,
}

impl SpecificPrior {
    pub fn new(mu0: MeanVector, lambda0: SpdMatrix, phi: SpdMatrix, nu: f64) -> Result<Self> {
        let k = mu0.dim();
        check_dim(k, lambda0.dim())?;
        check_dim(k, phi.dim())?;
        check_df(nu, k)?;
        Ok(SpecificPrior {
            mu0,
            lambda0,
            phi,
            nu,
        })
    }

    /// μ_s ~ N(0, 3000 I), Σ_s ~ W⁻¹(diag(0.01, 0.00005, 0.0005), 3).
    pub fn glass_default() -> Self {
        SpecificPrior {
            mu0: MeanVector::zeros(3),
            lambda0: SpdMatrix::scaled_identity(3, GLASS_MEAN_PRIOR_VARIANCE),
            phi: SpdMatrix::from_diagonal(&GLASS_WITHIN_SCALE).expect("positive diagonal"),
            nu: GLASS_DEGREES_OF_FREEDOM,
        }
    }

    pub fn dim(&self) -> usize {
        self.mu0.dim()
    }
}

/// Prior on θ_a = (μ_a, Σ_b, Σ_w). Shares nothing with [`SpecificPrior`]:
/// the two priors are independent by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AlternativePrior {
    pub mu0: MeanVector,
    pub lambda0: SpdMatrix,
    pub phi_b: SpdMatrix,
    pub nu_b: f64,
    pub phi_w: SpdMatrix,
    pub nu_w: f64,
}

impl AlternativePrior {
    pub fn new(
        mu0: MeanVector,
        lambda0: SpdMatrix,
        phi_b: SpdMatrix,
        nu_b: f64,
        phi_w: SpdMatrix,
        nu_w: f64,
    ) -> Result<Self> {
        let k = mu0.dim();
        check_dim(k, lambda0.dim())?;
        check_dim(k, phi_b.dim())?;
        check_dim(k, phi_w.dim())?;
        check_df(nu_b, k)?;
        check_df(nu_w, k)?;
        Ok(AlternativePrior {
            mu0,
            lambda0,
            phi_b,
            nu_b,
            phi_w,
            nu_w,
        })
    }

    /// μ_a ~ N(0, 3000 I), Σ_b ~ W⁻¹(I, 3), Σ_w ~ W⁻¹(diag(0.01, 0.00005, 0.0005), 3).
    pub fn glass_default() -> Self {
        AlternativePrior {
            mu0: MeanVector::zeros(3),
            lambda0: SpdMatrix::scaled_identity(3, GLASS_MEAN_PRIOR_VARIANCE),
            phi_b: SpdMatrix::identity(3),
            nu_b: GLASS_DEGREES_OF_FREEDOM,
            phi_w: SpdMatrix::from_diagonal(&GLASS_WITHIN_SCALE).expect("positive diagonal"),
            nu_w: GLASS_DEGREES_OF_FREEDOM,
        }
    }

    pub fn dim(&self) -> usize {
        self.mu0.dim()
    }
}
