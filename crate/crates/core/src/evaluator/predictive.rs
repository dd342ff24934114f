//! Posterior-predictive log densities of the trace fragments.

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::plugin::AltPlugInEstimate;
use crate::error::{Error, Result};
use crate::samplers::{effective_sample_size, AlternativeDrawSet, Draw, DrawSet, SpecificDrawSet};
use crate::stats::linalg::check_dim;
use crate::stats::mvn::mvn_logpdf_unchecked;
use crate::stats::{compound_logpdf, log_mean_exp, MeanVector};

#[derive(Debug, Clone, PartialEq)]
pub struct LogDensityEstimate {
    /// Natural-log density; -∞ only when `all_neg_infinite` is set.
    pub log_value: f64,
    /// Monte Carlo standard error of `log_value` (0 for deterministic values).
    pub mc_se: f64,
    /// Draws averaged over (0 for deterministic values).
    pub draws: usize,
    /// Effective sample size of the averaged weights, when computed.
    pub ess: Option<f64>,
    pub all_neg_infinite: bool,
    /// Content hash of the trace fragments evaluated.
    pub trace_fingerprint: String,
    pub dim: usize,
}

/// Order-independent hash of a fragment set.
pub fn trace_fingerprint(e_u: &[MeanVector]) -> String {
    let mut hasher = Sha256::new();
    for y in canonical(e_u) {
        hasher.update((y.dim() as u64).to_le_bytes());
        for v in y.iter() {
            hasher.update(v.to_bits().to_le_bytes());
        }
    }
    hasher.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn canonical(e_u: &[MeanVector]) -> Vec<&MeanVector> {
    let mut v: Vec<&MeanVector> = e_u.iter().collect();
    v.sort_by(|a, b| a.canonical_cmp(b));
    v
}

fn check_trace(e_u: &[MeanVector], k: usize) -> Result<()> {
    if e_u.is_empty() {
        return Err(Error::EmptyInput("e_u"));
    }
    for y in e_u {
        check_dim(k, y.dim())?;
    }
    Ok(())
}

/// log π(e_u | e_s, M_p): average over draws of Π_j N(y_j; μ_s, Σ_s).
pub fn log_numerator(e_u: &[MeanVector], draws: &SpecificDrawSet) -> Result<LogDensityEstimate> {
    if draws.is_empty() {
        return Err(Error::EmptyInput("prosecution draws"));
    }
    let k = draws.dim();
    check_trace(e_u, k)?;
    let ordered = canonical(e_u);
    let terms: Vec<f64> = draws
        .draws()
        .par_iter()
        .map(|d| {
            ordered
                .iter()
                .map(|y| mvn_logpdf_unchecked(y.as_vector(), d.mu.as_vector(), &d.sigma))
                .sum()
        })
        .collect();
    summarize(&terms, draws, e_u)
}

/// log f(e_u | θ̂_a): compound density at the plug-in estimate.
pub fn log_denominator_plugin(
    e_u: &[MeanVector],
    est: &AltPlugInEstimate,
) -> Result<LogDensityEstimate> {
    let k = est.mu_hat.dim();
    check_trace(e_u, k)?;
    let log_value = compound_logpdf(e_u, &est.mu_hat, &est.sigma_b_hat, &est.sigma_w_hat)?;
    Ok(LogDensityEstimate {
        log_value,
        mc_se: 0.0,
        draws: 0,
        ess: None,
        all_neg_infinite: log_value == f64::NEG_INFINITY,
        trace_fingerprint: trace_fingerprint(e_u),
        dim: k,
    })
}

/// log π(e_u | e_a, M_d): average over draws of the compound density.
pub fn log_denominator_full(
    e_u: &[MeanVector],
    draws: &AlternativeDrawSet,
) -> Result<LogDensityEstimate> {
    if draws.is_empty() {
        return Err(Error::EmptyInput("defense draws"));
    }
    let k = draws.dim();
    check_trace(e_u, k)?;
    let terms: Vec<f64> = draws
        .draws()
        .par_iter()
        .map(|d| compound_logpdf(e_u, &d.mu, &d.sigma_b, &d.sigma_w))
        .collect::<Result<_>>()?;
    summarize(&terms, draws, e_u)
}

fn summarize<D: Draw>(
    terms: &[f64],
    draws: &DrawSet<D>,
    e_u: &[MeanVector],
) -> Result<LogDensityEstimate> {
    let lm = log_mean_exp(terms)?;
    let (mc_se, ess) = if lm.all_neg_infinite {
        (0.0, None)
    } else {
        log_mean_se(terms, draws)?
    };
    Ok(LogDensityEstimate {
        log_value: lm.value,
        mc_se,
        draws: terms.len(),
        ess,
        all_neg_infinite: lm.all_neg_infinite,
        trace_fingerprint: trace_fingerprint(e_u),
        dim: draws.dim(),
    })
}

/// Delta method: se(log w̄) = sd(w) / (w̄ √ESS), with w_t = exp(l_t - max)
/// and ESS summed over chains. Chains too short for an autocorrelation
/// estimate fall back to treating draws as independent.
fn log_mean_se<D: Draw>(terms: &[f64], draws: &DrawSet<D>) -> Result<(f64, Option<f64>)> {
    let n = terms.len();
    if n < 2 {
        return Ok((0.0, None));
    }
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = terms.iter().map(|l| (l - max).exp()).collect();
    let mean = w.iter().sum::<f64>() / n as f64;
    let var = w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var == 0.0 {
        return Ok((0.0, Some(n as f64)));
    }
    let per_chain = draws.settings().retained_per_chain().max(1);
    let mut ess = 0.0;
    for chunk in w.chunks(per_chain) {
        ess += match effective_sample_size(chunk) {
            Ok(e) => e,
            Err(Error::DegenerateChain) => chunk.len() as f64,
            Err(Error::ChainTooShort { .. }) => chunk.len() as f64,
            Err(e) => return Err(e),
        };
    }
    Ok((var.sqrt() / (mean * ess.sqrt()), Some(ess)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::{AlternativeDraw, McmcSettings, SpecificDraw};
    use crate::stats::{mvn_logpdf, SpdMatrix};

    fn v(x: &[f64]) -> MeanVector {
        MeanVector::from_slice(x).unwrap()
    }

    fn one_draw() -> McmcSettings {
        McmcSettings {
            iterations: 1,
            burn_in: 0,
            thin: 1,
            seed: 1,
            chains: 1,
        }
    }

    #[test]
    fn single_specific_draw_is_exact() {
        let mu = v(&[0.5, -1.0]);
        let sigma = SpdMatrix::new(nalgebra::dmatrix![1.0, 0.3; 0.3, 2.0]).unwrap();
        let set = DrawSet::new(2, one_draw(), vec![SpecificDraw { mu: mu.clone(), sigma: sigma.clone() }]).unwrap();
        let e_u = vec![v(&[0.0, 0.0]), v(&[1.0, -2.0])];
        let est = log_numerator(&e_u, &set).unwrap();
        let expected = mvn_logpdf(&e_u[0], &mu, &sigma).unwrap() + mvn_logpdf(&e_u[1], &mu, &sigma).unwrap();
        assert!((est.log_value - expected).abs() < 1e-12);
        assert_eq!(est.mc_se, 0.0);
        assert_eq!(est.draws, 1);
    }

    #[test]
    fn single_alternative_draw_is_exact() {
        let d = AlternativeDraw {
            mu: v(&[1.0]),
            sigma_b: SpdMatrix::from_diagonal(&[2.0]).unwrap(),
            sigma_w: SpdMatrix::from_diagonal(&[0.5]).unwrap(),
        };
        let set = DrawSet::new(1, one_draw(), vec![d.clone()]).unwrap();
        let e_u = vec![v(&[0.2]), v(&[1.4]), v(&[0.9])];
        let est = log_denominator_full(&e_u, &set).unwrap();
        let expected = compound_logpdf(&e_u, &d.mu, &d.sigma_b, &d.sigma_w).unwrap();
        assert_eq!(est.log_value, expected);
    }

    #[test]
    fn fingerprint_ignores_order() {
        let a = vec![v(&[1.0, 2.0]), v(&[3.0, 4.0])];
        let b = vec![v(&[3.0, 4.0]), v(&[1.0, 2.0])];
        assert_eq!(trace_fingerprint(&a), trace_fingerprint(&b));
        assert_ne!(trace_fingerprint(&a), trace_fingerprint(&a[..1]));
    }

    #[test]
    fn dimension_mismatch() {
        let set = DrawSet::new(
            1,
            one_draw(),
            vec![SpecificDraw { mu: v(&[0.0]), sigma: SpdMatrix::identity(1) }],
        )
        .unwrap();
        assert!(matches!(
            log_numerator(&[v(&[0.0, 1.0])], &set),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(log_numerator(&[], &set), Err(Error::EmptyInput(_))));
    }
}
