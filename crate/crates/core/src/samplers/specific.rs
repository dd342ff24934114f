//! Gibbs sampler for θ_s = (μ_s, Σ_s) given the specific-source sample.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::drawset::{DrawSet, SpecificDraw, SpecificDrawSet};
use super::priors::SpecificPrior;
use super::settings::McmcSettings;
use super::{conjugate_mean, sampler_error};
use crate::error::{Error, Result};
use crate::stats::linalg::check_dim;
use crate::stats::rng::streams;
use crate::stats::{sample_inverse_wishart, MeanVector, RngStream, SpdMatrix};

/// Test hooks that switch parts of the sampler off.
#[derive(Debug, Clone, Default)]
pub struct SpecificHooks {
    /// Hold Σ_s at this value instead of sampling it.
    pub fixed_sigma: Option<SpdMatrix>,
    /// Ignore the data entirely and sample the prior.
    pub prior_only: bool,
}

pub fn gibbs_specific(
    e_s: &[MeanVector],
    prior: &SpecificPrior,
    mcmc: &McmcSettings,
) -> Result<SpecificDrawSet> {
    gibbs_specific_with(e_s, prior, mcmc, &SpecificHooks::default())
}

pub fn gibbs_specific_with(
    e_s: &[MeanVector],
    prior: &SpecificPrior,
    mcmc: &McmcSettings,
    hooks: &SpecificHooks,
) -> Result<SpecificDrawSet> {
    mcmc.validate()?;
    let k = prior.dim();
    let data: &[MeanVector] = if hooks.prior_only { &[] } else { e_s };
    if data.is_empty() && !hooks.prior_only {
        return Err(Error::EmptyInput("e_s"));
    }
    for y in data {
        check_dim(k, y.dim())?;
    }
    if let Some(s) = &hooks.fixed_sigma {
        check_dim(k, s.dim())?;
    }

    let chains: Vec<Vec<SpecificDraw>> = (0..mcmc.chains)
        .into_par_iter()
        .map(|c| {
            let mut rng = RngStream::new(mcmc.seed, streams::specific_chain(c));
            run_chain(data, prior, mcmc, hooks, &mut rng)
        })
        .collect::<Result<_>>()?;
    DrawSet::new(k, *mcmc, chains.into_iter().flatten().collect())
}

fn run_chain(
    data: &[MeanVector],
    prior: &SpecificPrior,
    mcmc: &McmcSettings,
    hooks: &SpecificHooks,
    rng: &mut RngStream,
) -> Result<Vec<SpecificDraw>> {
    let k = prior.dim();
    let m = data.len();
    let ybar = if m > 0 {
        data.iter().fold(DVector::zeros(k), |acc, y| acc + y.as_vector()) / m as f64
    } else {
        prior.mu0.as_vector().clone()
    };
    let prior_prec = prior.lambda0.inverse();
    let prior_term = &prior_prec * prior.mu0.as_vector();

    // μ_s is drawn first each sweep, so only Σ_s needs an initial value.
    let mut sigma = match &hooks.fixed_sigma {
        Some(s) => s.clone(),
        None => prior.phi.scale(1.0 / prior.nu)?,
    };

    let mut out = Vec::with_capacity(mcmc.retained_per_chain());
    for it in 0..mcmc.iterations {
        let mut step = || -> Result<(DVector<f64>, SpdMatrix)> {
            // μ_s | Σ_s ~ N(P⁻¹(Λ0⁻¹μ0 + mΣ⁻¹ȳ), P⁻¹), P = Λ0⁻¹ + mΣ⁻¹.
            let sigma_inv = sigma.inverse();
            let data_prec = &sigma_inv * m as f64;
            let data_term = &data_prec * &ybar;
            let mu_new = conjugate_mean(&prior_prec, &prior_term, &data_prec, &data_term, rng)?;
            let sigma_new = match &hooks.fixed_sigma {
                Some(s) => s.clone(),
                None => {
                    // Σ_s | μ_s ~ W⁻¹(Φ + Σ (y - μ)(y - μ)ᵀ, ν + m).
                    let mut scatter = DMatrix::zeros(k, k);
                    for y in data {
                        let d = y.as_vector() - &mu_new;
                        scatter += &d * d.transpose();
                    }
                    let scale = SpdMatrix::symmetrized(prior.phi.matrix() + scatter)?;
                    sample_inverse_wishart(&scale, prior.nu + m as f64, rng)?
                }
            };
            Ok((mu_new, sigma_new))
        };
        let (mu_new, sigma_new) = step().map_err(|e| sampler_error(it, e))?;
        sigma = sigma_new;
        if mcmc.keeps(it) {
            out.push(SpecificDraw {
                mu: MeanVector::new(mu_new).map_err(|e| sampler_error(it, e))?,
                sigma: sigma.clone(),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> MeanVector {
        MeanVector::from_slice(x).unwrap()
    }

    fn short() -> McmcSettings {
        McmcSettings {
            iterations: 3000,
            burn_in: 200,
            thin: 1,
            seed: 5,
            chains: 1,
        }
    }

    #[test]
    fn draw_count_and_spd() {
        let e_s = vec![v(&[1.0, 2.0, 3.0]), v(&[1.1, 2.01, 3.02]), v(&[0.9, 1.99, 2.97])];
        let mcmc = McmcSettings {
            chains: 2,
            ..short()
        };
        let set = gibbs_specific(&e_s, &SpecificPrior::glass_default(), &mcmc).unwrap();
        assert_eq!(set.len(), 2 * 2800);
        for d in set.draws() {
            assert!(SpdMatrix::new(d.sigma.matrix().clone()).is_ok());
        }
    }

    #[test]
    fn deterministic() {
        let e_s = vec![v(&[1.0, 2.0, 3.0]), v(&[1.1, 2.01, 3.02])];
        let a = gibbs_specific(&e_s, &SpecificPrior::glass_default(), &short()).unwrap();
        let b = gibbs_specific(&e_s, &SpecificPrior::glass_default(), &short()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_data_rejected() {
        assert!(gibbs_specific(&[], &SpecificPrior::glass_default(), &short()).is_err());
    }

    #[test]
    fn invalid_settings_rejected() {
        let mcmc = McmcSettings {
            thin: 0,
            ..short()
        };
        let e_s = vec![v(&[1.0, 2.0, 3.0])];
        assert!(matches!(
            gibbs_specific(&e_s, &SpecificPrior::glass_default(), &mcmc),
            Err(Error::InvalidSettings(_))
        ));
    }
}
