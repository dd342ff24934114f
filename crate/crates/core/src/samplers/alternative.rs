//! Gibbs sampler for θ_a = (μ_a, Σ_b, Σ_w) under the random-effects model
//! y_ij = μ_a + a_i + w_ij, with the source effects a_i as latent variables.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::drawset::{AlternativeDraw, AlternativeDrawSet, DrawSet};
use super::priors::AlternativePrior;
use super::settings::McmcSettings;
use super::{conjugate_mean, sampler_error};
use crate::error::{Error, Result};
use crate::stats::linalg::check_dim;
use crate::stats::mvn::sample_mvn_raw;
use crate::stats::rng::streams;
use crate::stats::{sample_inverse_wishart, MeanVector, RngStream, SpdMatrix};

#[derive(Debug, Clone, Default)]
pub struct AlternativeHooks {
    pub fixed_sigma_b: Option<SpdMatrix>,
    pub fixed_sigma_w: Option<SpdMatrix>,
    /// Ignore the data and sample the prior.
    pub prior_only: bool,
}

/// Size and mean of one source.
struct GroupStats {
    m: f64,
    mean: DVector<f64>,
}

/// Groups sorted into a canonical order by content, so relabeling or
/// reordering sources leaves the chain bit-identical.
pub(crate) fn canonical_groups(groups: &[Vec<MeanVector>]) -> Vec<Vec<MeanVector>> {
    let mut out: Vec<Vec<MeanVector>> = groups
        .iter()
        .map(|g| {
            let mut g = g.clone();
            g.sort_by(|a, b| a.canonical_cmp(b));
            g
        })
        .collect();
    out.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.canonical_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or_else(|| a.len().cmp(&b.len()))
    });
    out
}

pub fn gibbs_alternative(
    e_a: &[Vec<MeanVector>],
    prior: &AlternativePrior,
    mcmc: &McmcSettings,
) -> Result<AlternativeDrawSet> {
    gibbs_alternative_with(e_a, prior, mcmc, &AlternativeHooks::default())
}

pub fn gibbs_alternative_with(
    e_a: &[Vec<MeanVector>],
    prior: &AlternativePrior,
    mcmc: &McmcSettings,
    hooks: &AlternativeHooks,
) -> Result<AlternativeDrawSet> {
    mcmc.validate()?;
    let k = prior.dim();
    let groups = if hooks.prior_only {
        Vec::new()
    } else {
        if e_a.len() < 2 {
            return Err(Error::TooFewSources(e_a.len()));
        }
        if e_a.iter().any(Vec::is_empty) {
            return Err(Error::EmptyInput("alternative source without fragments"));
        }
        canonical_groups(e_a)
    };
    for y in groups.iter().flatten() {
        check_dim(k, y.dim())?;
    }
    for s in [&hooks.fixed_sigma_b, &hooks.fixed_sigma_w].into_iter().flatten() {
        check_dim(k, s.dim())?;
    }

    let chains: Vec<Vec<AlternativeDraw>> = (0..mcmc.chains)
        .into_par_iter()
        .map(|c| {
            let mut rng = RngStream::new(mcmc.seed, streams::alternative_chain(c));
            run_chain(&groups, prior, mcmc, hooks, &mut rng)
        })
        .collect::<Result<_>>()?;
    DrawSet::new(k, *mcmc, chains.into_iter().flatten().collect())
}

fn run_chain(
    groups: &[Vec<MeanVector>],
    prior: &AlternativePrior,
    mcmc: &McmcSettings,
    hooks: &AlternativeHooks,
    rng: &mut RngStream,
) -> Result<Vec<AlternativeDraw>> {
    let k = prior.dim();
    let stats: Vec<GroupStats> = groups
        .iter()
        .map(|g| GroupStats {
            m: g.len() as f64,
            mean: g.iter().fold(DVector::zeros(k), |acc, y| acc + y.as_vector()) / g.len() as f64,
        })
        .collect();
    // Σ_ij (y_ij - ȳ_i)(y_ij - ȳ_i)ᵀ does not change across iterations.
    let mut within = DMatrix::zeros(k, k);
    for (g, s) in groups.iter().zip(&stats) {
        for y in g {
            let d = y.as_vector() - &s.mean;
            within += &d * d.transpose();
        }
    }
    let total: f64 = stats.iter().map(|s| s.m).sum();
    let n = stats.len() as f64;
    let prior_prec = prior.lambda0.inverse();
    let prior_term = &prior_prec * prior.mu0.as_vector();

    let mut mu = if stats.is_empty() {
        prior.mu0.as_vector().clone()
    } else {
        stats.iter().fold(DVector::zeros(k), |acc, s| acc + &s.mean * s.m) / total
    };
    let mut effects: Vec<DVector<f64>> = stats.iter().map(|s| &s.mean - &mu).collect();
    let mut sigma_b = match &hooks.fixed_sigma_b {
        Some(s) => s.clone(),
        None => prior.phi_b.scale(1.0 / prior.nu_b)?,
    };
    let mut sigma_w = match &hooks.fixed_sigma_w {
        Some(s) => s.clone(),
        None => prior.phi_w.scale(1.0 / prior.nu_w)?,
    };

    let mut out = Vec::with_capacity(mcmc.retained_per_chain());
    for it in 0..mcmc.iterations {
        let mut step = || -> Result<()> {
            let w_inv = sigma_w.inverse();
            let b_inv = sigma_b.inverse();

            // a_i | rest ~ N(V_i m_i Σ_w⁻¹ (ȳ_i - μ_a), V_i), V_i = (Σ_b⁻¹ + m_i Σ_w⁻¹)⁻¹.
            for (a, s) in effects.iter_mut().zip(&stats) {
                let prec = &b_inv + &w_inv * s.m;
                let cov = SpdMatrix::symmetrized(SpdMatrix::symmetrized(prec)?.inverse())?;
                let mean = cov.matrix() * (&w_inv * ((&s.mean - &mu) * s.m));
                *a = sample_mvn_raw(&mean, &cov, rng);
            }

            // μ_a | rest: y_ij - a_i ~ N(μ_a, Σ_w).
            let resid_sum = stats
                .iter()
                .zip(&effects)
                .fold(DVector::zeros(k), |acc, (s, a)| acc + (&s.mean - a) * s.m);
            let data_prec = &w_inv * total;
            let data_term = &w_inv * resid_sum;
            mu = conjugate_mean(&prior_prec, &prior_term, &data_prec, &data_term, rng)?;

            // Σ_w | rest ~ W⁻¹(Φ_w + Σ_ij r r ᵀ, ν_w + Σ m_i), r = y_ij - μ_a - a_i.
            if hooks.fixed_sigma_w.is_none() {
                let mut scatter = within.clone();
                for (s, a) in stats.iter().zip(&effects) {
                    let d = &s.mean - &mu - a;
                    scatter += (&d * d.transpose()) * s.m;
                }
                let scale = SpdMatrix::symmetrized(prior.phi_w.matrix() + scatter)?;
                sigma_w = sample_inverse_wishart(&scale, prior.nu_w + total, rng)?;
            }

            // Σ_b | rest ~ W⁻¹(Φ_b + Σ a_i a_iᵀ, ν_b + n).
            if hooks.fixed_sigma_b.is_none() {
                let mut scatter = DMatrix::zeros(k, k);
                for a in &effects {
                    scatter += a * a.transpose();
                }
                let scale = SpdMatrix::symmetrized(prior.phi_b.matrix() + scatter)?;
                sigma_b = sample_inverse_wishart(&scale, prior.nu_b + n, rng)?;
            }
            Ok(())
        };
        step().map_err(|e| sampler_error(it, e))?;
        if mcmc.keeps(it) {
            out.push(AlternativeDraw {
                mu: MeanVector::new(mu.clone()).map_err(|e| sampler_error(it, e))?,
                sigma_b: sigma_b.clone(),
                sigma_w: sigma_w.clone(),
            });
        }
    }
    Ok(out)
}
