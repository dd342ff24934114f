use super::plugin::AltPlugInEstimate;
use super::predictive::LogDensityEstimate;
use crate::error::{Error, Result};
use crate::samplers::McmcSettings;
use crate::text::{put, KvDocument};

pub const DEFAULT_HP: &str = "the trace fragments come from the specific source";
pub const DEFAULT_HD: &str = "the trace fragments come from some other source in the alternative population";

/// Where a report came from. Everything except `generated_at` is part of
/// the reproducible body.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub scenario_label: String,
    pub hypothesis_p: String,
    pub hypothesis_d: String,
    pub tool_version: String,
    pub config_hash: String,
    pub specific_mcmc: McmcSettings,
    pub alternative_mcmc: McmcSettings,
    pub generated_at: Option<String>,
}

impl Provenance {
    pub fn new(scenario_label: impl Into<String>, config_hash: impl Into<String>, mcmc: McmcSettings) -> Self {
        Provenance {
            scenario_label: scenario_label.into(),
            hypothesis_p: DEFAULT_HP.to_string(),
            hypothesis_d: DEFAULT_HD.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config_hash.into(),
            specific_mcmc: mcmc,
            alternative_mcmc: mcmc,
            generated_at: None,
        }
    }
}

/// One value of evidence, on both scales.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueOfEvidence {
    pub log_v: f64,
    pub v: f64,
    /// √(se_num² + se_den²): numerator and denominator use independent streams.
    pub mc_se_log_v: f64,
}

impl ValueOfEvidence {
    fn from_parts(num: &LogDensityEstimate, den: &LogDensityEstimate) -> Self {
        let log_v = num.log_value - den.log_value;
        ValueOfEvidence {
            log_v,
            v: log_v.exp(),
            mc_se_log_v: num.mc_se.hypot(den.mc_se),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlugInAudit {
    pub clamped: bool,
    pub min_eigenvalue_before_repair: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BayesFactorReport {
    pub numerator: LogDensityEstimate,
    pub denominator_plugin: LogDensityEstimate,
    pub denominator_full: LogDensityEstimate,
    pub plugin: ValueOfEvidence,
    pub full: ValueOfEvidence,
    pub plugin_audit: Option<PlugInAudit>,
    pub provenance: Provenance,
}

pub fn assemble_report(
    numerator: LogDensityEstimate,
    denominator_plugin: LogDensityEstimate,
    denominator_full: LogDensityEstimate,
    provenance: Provenance,
) -> Result<BayesFactorReport> {
    for (name, den) in [("plug-in", &denominator_plugin), ("full", &denominator_full)] {
        if den.dim != numerator.dim {
            return Err(Error::ProvenanceMismatch(format!(
                "{name} denominator has dimension {}, numerator {}",
                den.dim, numerator.dim
            )));
        }
        if den.trace_fingerprint != numerator.trace_fingerprint {
            return Err(Error::ProvenanceMismatch(format!(
                "{name} denominator evaluated trace {}, numerator {}",
                den.trace_fingerprint, numerator.trace_fingerprint
            )));
        }
    }
    Ok(BayesFactorReport {
        plugin: ValueOfEvidence::from_parts(&numerator, &denominator_plugin),
        full: ValueOfEvidence::from_parts(&numerator, &denominator_full),
        numerator,
        denominator_plugin,
        denominator_full,
        plugin_audit: None,
        provenance,
    })
}

/// Posterior odds = value of evidence × prior odds.
pub fn posterior_odds(prior_odds: f64, v: f64) -> Result<f64> {
    for (what, x) in [("prior odds", prior_odds), ("value of evidence", v)] {
        if !x.is_finite() {
            return Err(Error::NonFinite(what));
        }
        if x < 0.0 {
            return Err(Error::NegativeInput { what, value: x });
        }
    }
    Ok(prior_odds * v)
}

impl BayesFactorReport {
    pub fn with_plugin_estimate(mut self, est: &AltPlugInEstimate) -> Self {
        self.plugin_audit = Some(PlugInAudit {
            clamped: est.clamped,
            min_eigenvalue_before_repair: est.min_eigenvalue_before_repair,
        });
        self
    }

    pub fn to_document(&self) -> KvDocument {
        let p = &self.provenance;
        let mut doc = KvDocument::new();
        let s = doc.section("scenario");
        put(s, "label", p.scenario_label.as_str());
        put(s, "h_p", p.hypothesis_p.as_str());
        put(s, "h_d", p.hypothesis_d.as_str());
        put(s, "dim", self.numerator.dim);
        put(s, "trace_fingerprint", self.numerator.trace_fingerprint.as_str());

        for (name, est) in [
            ("numerator", &self.numerator),
            ("denominator_plugin", &self.denominator_plugin),
            ("denominator_full", &self.denominator_full),
        ] {
            let s = doc.section(name);
            put(s, "log_value", est.log_value);
            put(s, "value", est.log_value.exp());
            put(s, "mc_se_log", est.mc_se);
            put(s, "draws", est.draws);
            if let Some(ess) = est.ess {
                put(s, "ess", ess);
            }
            put(s, "all_neg_infinite", est.all_neg_infinite);
        }

        for (name, v) in [("v_plugin", &self.plugin), ("v_full", &self.full)] {
            let s = doc.section(name);
            put(s, "log_v", v.log_v);
            put(s, "v", v.v);
            put(s, "mc_se_log_v", v.mc_se_log_v);
            if name == "v_plugin" {
                if let Some(a) = &self.plugin_audit {
                    put(s, "clamped", a.clamped);
                    put(s, "min_eigenvalue_before_repair", a.min_eigenvalue_before_repair);
                }
            }
        }

        let s = doc.section("provenance");
        put(s, "tool_version", p.tool_version.as_str());
        put(s, "config_hash", p.config_hash.as_str());
        for (prefix, m) in [("specific", &p.specific_mcmc), ("alternative", &p.alternative_mcmc)] {
            put(s, &format!("{prefix}_seed"), m.seed);
            put(s, &format!("{prefix}_chains"), m.chains);
            put(s, &format!("{prefix}_iterations"), m.iterations);
            put(s, &format!("{prefix}_burn_in"), m.burn_in);
            put(s, &format!("{prefix}_thin"), m.thin);
        }
        if let Some(t) = &p.generated_at {
            put(s, "generated_at", t.as_str());
        }
        doc
    }

    /// Structured key/value report (TOML).
    pub fn render_structured(&self) -> String {
        self.to_document().render()
    }

    /// Short human-readable summary.
    pub fn render_text(&self) -> String {
        let p = &self.provenance;
        let mut out = String::new();
        out.push_str(&format!("scenario: {}\n", p.scenario_label));
        out.push_str(&format!("H_p: {}\nH_d: {}\n\n", p.hypothesis_p, p.hypothesis_d));
        let line = |label: &str, e: &LogDensityEstimate| {
            format!(
                "{label:<34} log = {:>12.6}  value = {:>14.6e}  mc_se(log) = {:.2e}\n",
                e.log_value,
                e.log_value.exp(),
                e.mc_se
            )
        };
        out.push_str(&line("numerator  pi(e_u|e_s,M_p)", &self.numerator));
        out.push_str(&line("denominator f(e_u|theta_a hat)", &self.denominator_plugin));
        out.push_str(&line("denominator pi(e_u|e_a,M_d)", &self.denominator_full));
        out.push('\n');
        for (label, v) in [("V (parameters known)", &self.plugin), ("V (parameters unknown)", &self.full)] {
            out.push_str(&format!(
                "{label:<24} V = {:>14.6e}  log V = {:>12.6}  mc_se(log V) = {:.2e}\n",
                v.v, v.log_v, v.mc_se_log_v
            ));
        }
        if let Some(a) = &self.plugin_audit {
            if a.clamped {
                out.push_str(&format!(
                    "note: plug-in covariance repaired (min eigenvalue before repair {:e})\n",
                    a.min_eigenvalue_before_repair
                ));
            }
        }
        out.push_str(&format!(
            "\ntool {} config {} seed {}\n",
            p.tool_version, p.config_hash, p.specific_mcmc.seed
        ));
        out
    }
}
