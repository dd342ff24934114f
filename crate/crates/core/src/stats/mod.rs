//! Probability kernels shared by every pipeline: multivariate normal and
//! inverse-Wishart densities and samplers, the compound random-effects
//! density, and log-space reductions. Everything is seed-reproducible
//! through [`RngStream`].

pub mod compound;
pub mod linalg;
pub mod logspace;
pub mod mvn;
pub mod rng;
pub mod wishart;

pub use compound::{compound_logpdf, compound_logpdf_capped, DEFAULT_MAX_STACKED_DIM};
pub use linalg::{MeanVector, SpdMatrix};
pub use logspace::{log_mean_exp, LogMean};
pub use mvn::{mvn_logpdf, sample_mvn};
pub use rng::RngStream;
pub use wishart::{sample_inverse_wishart, sample_wishart};
