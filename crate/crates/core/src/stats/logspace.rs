use crate::error::{Error, Result};

/// Result of a log-space average. `all_neg_infinite` is the warning flag for
/// inputs whose every entry is -∞ (value is then -∞).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMean {
    pub value: f64,
    pub all_neg_infinite: bool,
}

/// log((1/n) Σ exp(v_i)) with the max shifted out.
pub fn log_mean_exp(values: &[f64]) -> Result<LogMean> {
    if values.is_empty() {
        return Err(Error::EmptyInput("log_mean_exp"));
    }
    if values.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
        return Err(Error::NonFinite("log_mean_exp input"));
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Ok(LogMean {
            value: f64::NEG_INFINITY,
            all_neg_infinite: true,
        });
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    let n = values.len() as f64;
    // Constant input: sum == n exactly, so the correction term is ln(1) = 0.
    Ok(LogMean {
        value: max + (sum / n).ln(),
        all_neg_infinite: false,
    })
}

pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}
