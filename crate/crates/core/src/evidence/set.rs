use std::collections::HashSet;
use std::fmt;

use nalgebra::DVector;

use super::dataset::{Fragment, SourceGroup};
use crate::error::{Error, Result};
use crate::stats::MeanVector;

/// The evidence triple: trace `e_u`, specific-source sample `e_s`, and the
/// alternative population sample `e_a` grouped by source.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceSet {
    trace: Vec<Fragment>,
    specific: Vec<Fragment>,
    alternative: Vec<SourceGroup>,
}

impl EvidenceSet {
    /// Builds a set and rejects it if any invariant is violated.
    pub fn new(
        trace: Vec<Fragment>,
        specific: Vec<Fragment>,
        alternative: Vec<SourceGroup>,
    ) -> Result<Self> {
        let set = Self::from_parts(trace, specific, alternative);
        let report = set.validate();
        if !report.is_valid() {
            return Err(Error::Scenario(report.violations.join("; ")));
        }
        Ok(set)
    }

    /// No validation; pair with [`EvidenceSet::validate`].
    pub fn from_parts(
        trace: Vec<Fragment>,
        specific: Vec<Fragment>,
        alternative: Vec<SourceGroup>,
    ) -> Self {
        EvidenceSet {
            trace,
            specific,
            alternative,
        }
    }

    pub fn trace(&self) -> &[Fragment] {
        &self.trace
    }

    pub fn specific(&self) -> &[Fragment] {
        &self.specific
    }

    pub fn alternative(&self) -> &[SourceGroup] {
        &self.alternative
    }

    pub fn trace_features(&self) -> Vec<MeanVector> {
        self.trace.iter().map(|f| f.features.clone()).collect()
    }

    pub fn specific_features(&self) -> Vec<MeanVector> {
        self.specific.iter().map(|f| f.features.clone()).collect()
    }

    pub fn alternative_features(&self) -> Vec<Vec<MeanVector>> {
        self.alternative.iter().map(SourceGroup::features).collect()
    }

    /// Feature dimension, taken from the first fragment found.
    pub fn dim(&self) -> usize {
        self.all_fragments().next().map_or(0, |f| f.features.dim())
    }

    pub fn alternative_fragment_count(&self) -> usize {
        self.alternative.iter().map(SourceGroup::len).sum()
    }

    fn all_fragments(&self) -> impl Iterator<Item = &Fragment> {
        self.trace
            .iter()
            .chain(&self.specific)
            .chain(self.alternative.iter().flat_map(|g| g.fragments.iter()))
    }

    pub fn validate(&self) -> ValidationReport {
        validate_evidence(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSummary {
    pub fragments: usize,
    pub sources: usize,
    pub mean: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub trace: ComponentSummary,
    pub specific: ComponentSummary,
    pub alternative: ComponentSummary,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, c) in [
            ("e_u", &self.trace),
            ("e_s", &self.specific),
            ("e_a", &self.alternative),
        ] {
            write!(f, "{name}: {} fragments, {} sources", c.fragments, c.sources)?;
            if let Some(m) = &c.mean {
                write!(f, ", mean {m:?}")?;
            }
            writeln!(f)?;
        }
        for v in &self.violations {
            writeln!(f, "violation: {v}")?;
        }
        Ok(())
    }
}

fn summarize<'a>(frags: impl Iterator<Item = &'a Fragment>, sources: usize, k: Option<usize>) -> ComponentSummary {
    let frags: Vec<&Fragment> = frags.collect();
    let mean = k.filter(|_| !frags.is_empty()).map(|k| {
        let sum = frags
            .iter()
            .fold(DVector::zeros(k), |acc, f| acc + f.features.as_vector());
        (sum / frags.len() as f64).iter().copied().collect()
    });
    ComponentSummary {
        fragments: frags.len(),
        sources,
        mean,
    }
}

/// Lists every invariant violation; never fails.
pub fn validate_evidence(e: &EvidenceSet) -> ValidationReport {
    let mut violations = Vec::new();
    let dims: HashSet<usize> = e.all_fragments().map(|f| f.features.dim()).collect();
    let consistent = dims.len() <= 1;
    if !consistent {
        violations.push("inconsistent feature dimension".to_string());
    }
    if e.specific.is_empty() {
        violations.push("e_s is empty".to_string());
    }
    if e.trace.is_empty() {
        violations.push("e_u is empty".to_string());
    }
    let specific_sources: HashSet<&str> = e.specific.iter().map(|f| f.source.as_str()).collect();
    if specific_sources.len() > 1 {
        violations.push("e_s must come from a single source".to_string());
    }
    if e.alternative.len() < 2 {
        violations.push("e_a needs ≥ 2 sources".to_string());
    }
    for g in &e.alternative {
        if g.is_empty() {
            violations.push(format!("alternative source `{}` has no fragments", g.id));
        }
    }
    let mut ids = HashSet::new();
    for g in &e.alternative {
        if !ids.insert(g.id.as_str()) {
            violations.push(format!("alternative source `{}` listed twice", g.id));
        }
        if specific_sources.contains(g.id.as_str()) {
            violations.push(format!("specific source `{}` appears in e_a", g.id));
        }
    }
    let mut keys = HashSet::new();
    for f in e.all_fragments() {
        if !keys.insert(f.key()) {
            violations.push(format!(
                "fragment ({}, {}) appears more than once",
                f.source, f.index
            ));
        }
    }
    let k = if consistent { dims.into_iter().next() } else { None };
    ValidationReport {
        violations,
        trace: summarize(e.trace.iter(), 1, k),
        specific: summarize(e.specific.iter(), specific_sources.len(), k),
        alternative: summarize(
            e.alternative.iter().flat_map(|g| g.fragments.iter()),
            e.alternative.len(),
            k,
        ),
    }
}
