//! Plug-in and full-Bayes values of evidence.

pub mod oracle;
pub mod pipeline;
pub mod plugin;
pub mod predictive;
pub mod report;

pub use oracle::{closed_form_predictive_known_cov, conjugate_posterior};
pub use pipeline::{run_pipeline, PipelineOutput};
pub use plugin::{plugin_estimates, AltPlugInEstimate, EIGENVALUE_FLOOR};
pub use predictive::{
    log_denominator_full, log_denominator_plugin, log_numerator, trace_fingerprint,
    LogDensityEstimate,
};
pub use report::{
    assemble_report, posterior_odds, BayesFactorReport, PlugInAudit, Provenance, ValueOfEvidence,
};
