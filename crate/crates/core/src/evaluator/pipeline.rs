//! End-to-end evaluation of one evidence set.

use super::plugin::{plugin_estimates, AltPlugInEstimate};
use super::predictive::{log_denominator_full, log_denominator_plugin, log_numerator};
use super::report::{assemble_report, BayesFactorReport, Provenance};
use crate::error::Result;
use crate::evidence::EvidenceSet;
use crate::samplers::{
    gibbs_alternative, gibbs_specific, AlternativeDrawSet, AlternativePrior, McmcSettings,
    SpecificDrawSet, SpecificPrior,
};

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub report: BayesFactorReport,
    pub plugin: AltPlugInEstimate,
    pub specific_draws: SpecificDrawSet,
    pub alternative_draws: AlternativeDrawSet,
}

/// Runs both samplers (concurrently, on disjoint streams), the plug-in
/// estimate and all three densities. `provenance.specific_mcmc` and
/// `provenance.alternative_mcmc` are overwritten with the settings used.
pub fn run_pipeline(
    evidence: &EvidenceSet,
    specific_prior: &SpecificPrior,
    alternative_prior: &AlternativePrior,
    mcmc: &McmcSettings,
    mut provenance: Provenance,
) -> Result<PipelineOutput> {
    let e_u = evidence.trace_features();
    let e_s = evidence.specific_features();
    let e_a = evidence.alternative_features();

    let plugin = plugin_estimates(&e_a)?;
    let (specific, alternative) = rayon::join(
        || gibbs_specific(&e_s, specific_prior, mcmc),
        || gibbs_alternative(&e_a, alternative_prior, mcmc),
    );
    let (specific_draws, alternative_draws) = (specific?, alternative?);

    let numerator = log_numerator(&e_u, &specific_draws)?;
    let den_plugin = log_denominator_plugin(&e_u, &plugin)?;
    let den_full = log_denominator_full(&e_u, &alternative_draws)?;
    provenance.specific_mcmc = *specific_draws.settings();
    provenance.alternative_mcmc = *alternative_draws.settings();
    let report = assemble_report(numerator, den_plugin, den_full, provenance)?
        .with_plugin_estimate(&plugin);
    Ok(PipelineOutput {
        report,
        plugin,
        specific_draws,
        alternative_draws,
    })
}
