use crate::error::{Error, Result};

pub const MIN_CHAIN_LEN: usize = 10;

/// Effective sample size by Geyer's initial positive sequence: autocorrelations
/// are summed in adjacent pairs ρ_{2m} + ρ_{2m+1} until a pair turns
/// non-positive, and ESS = n / (-1 + 2 Σ pairs), clamped to [1, n].
pub fn effective_sample_size(chain: &[f64]) -> Result<f64> {
    let n = chain.len();
    if n < MIN_CHAIN_LEN {
        return Err(Error::ChainTooShort {
            len: n,
            min: MIN_CHAIN_LEN,
        });
    }
    if chain.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("chain"));
    }
    let mean = chain.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = chain.iter().map(|v| v - mean).collect();
    let autocov = |lag: usize| -> f64 {
        centered[..n - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / n as f64
    };
    let gamma0 = autocov(0);
    if !(gamma0 > 0.0) || gamma0.sqrt() <= 1e-14 * mean.abs() {
        return Err(Error::DegenerateChain);
    }

    let mut sum_pairs = 0.0;
    let mut lag = 0;
    while lag + 1 < n {
        let pair = (autocov(lag) + autocov(lag + 1)) / gamma0;
        if pair <= 0.0 {
            break;
        }
        sum_pairs += pair;
        lag += 2;
    }
    let tau = (-1.0 + 2.0 * sum_pairs).max(1.0 / n as f64);
    Ok((n as f64 / tau).clamp(1.0, n as f64))
}

/// Summed ESS over independent chains.
pub fn pooled_ess(chains: &[&[f64]]) -> Result<f64> {
    chains.iter().map(|c| effective_sample_size(c)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::RngStream;

    #[test]
    fn iid_chain() {
        let mut rng = RngStream::new(1, 0);
        let n = 10_000;
        let xs: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
        let ess = effective_sample_size(&xs).unwrap();
        assert!((ess - n as f64).abs() < 0.15 * n as f64, "ess {ess}");
    }

    #[test]
    fn ar1_chain() {
        let rho: f64 = 0.5;
        let n = 100_000;
        let mut rng = RngStream::new(2, 0);
        let mut x = 0.0;
        let innov = (1.0 - rho * rho).sqrt();
        let xs: Vec<f64> = (0..n)
            .map(|_| {
                x = rho * x + innov * rng.standard_normal();
                x
            })
            .collect();
        let target = n as f64 * (1.0 - rho) / (1.0 + rho);
        let ess = effective_sample_size(&xs).unwrap();
        assert!((ess - target).abs() < 0.15 * target, "ess {ess} target {target}");
    }

    #[test]
    fn constant_chain_is_degenerate() {
        assert!(matches!(
            effective_sample_size(&[3.5; 100]),
            Err(Error::DegenerateChain)
        ));
    }

    #[test]
    fn short_chain() {
        assert!(matches!(
            effective_sample_size(&[1.0, 2.0, 3.0]),
            Err(Error::ChainTooShort { .. })
        ));
    }

    #[test]
    fn bounded_by_length() {
        // Alternating chain has strongly negative lag-1 correlation.
        let xs: Vec<f64> = (0..200).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let ess = effective_sample_size(&xs).unwrap();
        assert!((1.0..=200.0).contains(&ess));
    }
}
