//! Independent reference implementations used as test oracles. Nothing here
//! calls into the crate's numerical code.
#![allow(dead_code, clippy::needless_range_loop)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sourcebf::stats::{MeanVector, SpdMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(r: &mut ChaCha8Rng) -> f64 {
    r.sample(StandardNormal)
}

/// A A^T + 0.2 I with A standard normal, times `scale`.
pub fn random_spd(k: usize, scale: f64, r: &mut ChaCha8Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(k, k, |_, _| normal(r));
    (&a * a.transpose() + DMatrix::identity(k, k) * 0.2) * scale
}

pub fn random_vec(k: usize, scale: f64, r: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(k, |_, _| scale * normal(r))
}

pub fn mv(v: &DVector<f64>) -> MeanVector {
    MeanVector::new(v.clone()).unwrap()
}

pub fn spd(m: &DMatrix<f64>) -> SpdMatrix {
    SpdMatrix::symmetrized(m.clone()).unwrap()
}

/// Gaussian log density by LU determinant and explicit inverse.
pub fn gauss_logpdf(x: &DVector<f64>, mu: &DVector<f64>, sigma: &DMatrix<f64>) -> f64 {
    let k = x.len() as f64;
    let det = sigma.clone().lu().determinant();
    let inv = sigma.clone().try_inverse().unwrap();
    let d = x - mu;
    let q = (d.transpose() * inv * &d)[(0, 0)];
    -0.5 * (k * (2.0 * std::f64::consts::PI).ln() + det.ln() + q)
}

/// Plug-in estimators written as explicit scalar loops over (i, j, p, q).
pub fn brute_plugin(groups: &[Vec<Vec<f64>>]) -> (Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = groups.len();
    let m = groups[0].len();
    let k = groups[0][0].len();
    let mut grand = vec![0.0; k];
    let mut means = vec![vec![0.0; k]; n];
    for i in 0..n {
        for p in 0..k {
            let mut s = 0.0;
            for j in 0..m {
                s += groups[i][j][p];
            }
            means[i][p] = s / m as f64;
        }
    }
    for p in 0..k {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..m {
                s += groups[i][j][p];
            }
        }
        grand[p] = s / (n * m) as f64;
    }
    let mut sw = vec![vec![0.0; k]; k];
    let mut sb = vec![vec![0.0; k]; k];
    for p in 0..k {
        for q in 0..k {
            let mut w = 0.0;
            for i in 0..n {
                for j in 0..m {
                    w += (groups[i][j][p] - means[i][p]) * (groups[i][j][q] - means[i][q]);
                }
            }
            sw[p][q] = w / (n * (m - 1)) as f64;
            let mut b = 0.0;
            for i in 0..n {
                b += (means[i][p] - grand[p]) * (means[i][q] - grand[q]);
            }
            sb[p][q] = b / (n - 1) as f64 - sw[p][q] / m as f64;
        }
    }
    (grand, sw, sb)
}

fn log_mean_exp_with_se(terms: &[f64]) -> (f64, f64) {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = terms.iter().map(|t| (t - max).exp()).collect();
    let n = w.len() as f64;
    let mean = w.iter().sum::<f64>() / n;
    let var = w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (max + mean.ln(), (var / n).sqrt() / mean)
}

/// log ∫ Π_j N(y_j; μ + a, Σ_w) N(a; 0, Σ_b) da by plain Monte Carlo over a,
/// with the delta-method standard error of the log estimate.
pub fn mc_compound(
    ys: &[DVector<f64>],
    mu: &DVector<f64>,
    sigma_b: &DMatrix<f64>,
    sigma_w: &DMatrix<f64>,
    draws: usize,
    seed: u64,
) -> (f64, f64) {
    let mut r = rng(seed);
    let k = mu.len();
    let l = sigma_b.clone().cholesky().unwrap().l();
    let kf = k as f64;
    let det = sigma_w.clone().lu().determinant();
    let inv = sigma_w.clone().try_inverse().unwrap();
    let c = -0.5 * (kf * (2.0 * std::f64::consts::PI).ln() + det.ln());
    let terms: Vec<f64> = (0..draws)
        .map(|_| {
            let z = DVector::from_fn(k, |_, _| normal(&mut r));
            let center = mu + &l * z;
            ys.iter()
                .map(|y| {
                    let d = y - &center;
                    c - 0.5 * (d.transpose() * &inv * &d)[(0, 0)]
                })
                .sum()
        })
        .collect();
    log_mean_exp_with_se(&terms)
}
