use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, Fragment, SourceGroup};
use super::set::EvidenceSet;
use crate::error::{Error, Result};

/// Which fragments play the trace of unknown origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TraceSelector {
    /// Fragments of the specific source not used for `e_s`. `None` takes all
    /// remaining fragments.
    SameSource {
        #[serde(default)]
        fragments: Option<Vec<usize>>,
    },
    /// Fragments of another source. That whole source leaves `e_a`.
    DifferentSource { source: String, fragments: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub specific_source: String,
    pub specific_fragments: Vec<usize>,
    pub trace: TraceSelector,
    #[serde(default)]
    pub excluded_sources: Vec<String>,
}

fn pick(group: &SourceGroup, indices: &[usize], role: &str) -> Result<Vec<Fragment>> {
    let mut seen = HashSet::new();
    indices
        .iter()
        .map(|&i| {
            if !seen.insert(i) {
                return Err(Error::Scenario(format!(
                    "fragment {i} of source `{}` listed twice for {role}",
                    group.id
                )));
            }
            group
                .fragments
                .iter()
                .find(|f| f.index == i)
                .cloned()
                .ok_or_else(|| {
                    Error::Scenario(format!("source `{}` has no fragment {i}", group.id))
                })
        })
        .collect()
}

/// Splits a grouped dataset into (e_u, e_s, e_a). The specific source and the
/// trace's source never contribute to `e_a`.
pub fn build_scenario(dataset: &Dataset, spec: &ScenarioSpec) -> Result<EvidenceSet> {
    let lookup = |id: &str| {
        dataset
            .group(id)
            .ok_or_else(|| Error::Scenario(format!("unknown source `{id}`")))
    };
    let specific_group = lookup(&spec.specific_source)?;
    for id in &spec.excluded_sources {
        lookup(id)?;
    }
    let specific = pick(specific_group, &spec.specific_fragments, "e_s")?;

    let (trace, trace_source) = match &spec.trace {
        TraceSelector::SameSource { fragments } => {
            let indices: Vec<usize> = match fragments {
                Some(list) => {
                    if let Some(i) = list.iter().find(|i| spec.specific_fragments.contains(i)) {
                        return Err(Error::Scenario(format!(
                            "fragment {i} of source `{}` selected for both e_s and e_u",
                            specific_group.id
                        )));
                    }
                    list.clone()
                }
                None => specific_group
                    .fragments
                    .iter()
                    .map(|f| f.index)
                    .filter(|i| !spec.specific_fragments.contains(i))
                    .collect(),
            };
            (pick(specific_group, &indices, "e_u")?, &spec.specific_source)
        }
        TraceSelector::DifferentSource { source, fragments } => {
            if source == &spec.specific_source {
                return Err(Error::Scenario(
                    "different-source trace names the specific source".into(),
                ));
            }
            (pick(lookup(source)?, fragments, "e_u")?, source)
        }
    };

    if specific.is_empty() {
        return Err(Error::Scenario("e_s is empty".into()));
    }
    if trace.is_empty() {
        return Err(Error::Scenario("e_u is empty".into()));
    }

    let alternative: Vec<SourceGroup> = dataset
        .groups
        .iter()
        .filter(|g| {
            g.id != spec.specific_source
                && &g.id != trace_source
                && !spec.excluded_sources.contains(&g.id)
        })
        .cloned()
        .collect();
    if alternative.len() < 2 {
        return Err(Error::TooFewSources(alternative.len()));
    }
    EvidenceSet::new(trace, specific, alternative)
}
