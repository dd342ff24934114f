//! Synthetic evidence from known parameters, and the study of how far the
//! plug-in and full-Bayes values drift apart as the population sample grows.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{run_pipeline, Provenance};
use crate::evidence::{Dataset, EvidenceSet, Fragment, SourceGroup};
use crate::samplers::{AlternativePrior, McmcSettings, SpecificPrior};
use crate::stats::linalg::check_dim;
use crate::stats::mvn::sample_mvn_raw;
use crate::stats::rng::streams;
use crate::stats::{MeanVector, RngStream, SpdMatrix};
use crate::text::fmt_f64;

pub const SPECIFIC_ID: &str = "specific";
pub const TRACE_ID: &str = "trace";

/// θ = (θ_s, θ_a).
#[derive(Debug, Clone, PartialEq)]
pub struct TrueParams {
    pub mu_s: MeanVector,
    pub sigma_s: SpdMatrix,
    pub mu_a: MeanVector,
    pub sigma_b: SpdMatrix,
    pub sigma_w: SpdMatrix,
}

impl TrueParams {
    pub fn new(
        mu_s: MeanVector,
        sigma_s: SpdMatrix,
        mu_a: MeanVector,
        sigma_b: SpdMatrix,
        sigma_w: SpdMatrix,
    ) -> Result<Self> {
        let k = mu_s.dim();
        check_dim(k, sigma_s.dim())?;
        check_dim(k, mu_a.dim())?;
        check_dim(k, sigma_b.dim())?;
        check_dim(k, sigma_w.dim())?;
        Ok(TrueParams {
            mu_s,
            sigma_s,
            mu_a,
            sigma_b,
            sigma_w,
        })
    }

    /// k = 2, μ_s = μ_a = 0, Σ_s = Σ_w = 0.25 I, Σ_b = I.
    pub fn study_default() -> Self {
        TrueParams {
            mu_s: MeanVector::zeros(2),
            sigma_s: SpdMatrix::scaled_identity(2, 0.25),
            mu_a: MeanVector::zeros(2),
            sigma_b: SpdMatrix::identity(2),
            sigma_w: SpdMatrix::scaled_identity(2, 0.25),
        }
    }

    pub fn dim(&self) -> usize {
        self.mu_s.dim()
    }
}

/// Which hypothesis generates the trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeneratingModel {
    /// Trace from the specific source.
    #[serde(rename = "M_p")]
    Prosecution,
    /// Trace from a fresh source of the alternative population.
    #[serde(rename = "M_d")]
    Defense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSpec {
    pub sources: usize,
    pub fragments_per_source: usize,
    pub specific_fragments: usize,
    pub trace_fragments: usize,
    pub model: GeneratingModel,
}

impl Default for DesignSpec {
    fn default() -> Self {
        DesignSpec {
            sources: 14,
            fragments_per_source: 5,
            specific_fragments: 3,
            trace_fragments: 2,
            model: GeneratingModel::Prosecution,
        }
    }
}

impl DesignSpec {
    pub fn validate(&self) -> Result<()> {
        if self.sources < 2 {
            return Err(Error::InvalidSettings(format!(
                "design needs at least 2 alternative sources, got {}",
                self.sources
            )));
        }
        for (name, v) in [
            ("fragments_per_source", self.fragments_per_source),
            ("specific_fragments", self.specific_fragments),
            ("trace_fragments", self.trace_fragments),
        ] {
            if v == 0 {
                return Err(Error::InvalidSettings(format!("design {name} must be at least 1")));
            }
        }
        Ok(())
    }
}

fn fragments(
    source: &str,
    first_index: usize,
    count: usize,
    mut draw: impl FnMut() -> nalgebra::DVector<f64>,
) -> Result<Vec<Fragment>> {
    (0..count)
        .map(|j| Ok(Fragment::new(source, first_index + j, MeanVector::new(draw())?)))
        .collect()
}

/// Draws (e_u, e_s, e_a). Alternative sources are `alt0001`, `alt0002`, ...;
/// under M_p the trace continues the fragment numbering of the specific source.
pub fn simulate_evidence(
    params: &TrueParams,
    design: &DesignSpec,
    rng: &mut RngStream,
) -> Result<EvidenceSet> {
    design.validate()?;
    let k = params.dim();
    let zero = nalgebra::DVector::zeros(k);

    let specific = fragments(SPECIFIC_ID, 1, design.specific_fragments, || {
        sample_mvn_raw(params.mu_s.as_vector(), &params.sigma_s, rng)
    })?;

    let mut alternative = Vec::with_capacity(design.sources);
    for i in 0..design.sources {
        let id = format!("alt{:04}", i + 1);
        let center = params.mu_a.as_vector() + sample_mvn_raw(&zero, &params.sigma_b, rng);
        let frags = fragments(&id, 1, design.fragments_per_source, || {
            sample_mvn_raw(&center, &params.sigma_w, rng)
        })?;
        alternative.push(SourceGroup { id, fragments: frags });
    }

    let trace = match design.model {
        GeneratingModel::Prosecution => fragments(
            SPECIFIC_ID,
            design.specific_fragments + 1,
            design.trace_fragments,
            || sample_mvn_raw(params.mu_s.as_vector(), &params.sigma_s, rng),
        )?,
        GeneratingModel::Defense => {
            let center = params.mu_a.as_vector() + sample_mvn_raw(&zero, &params.sigma_b, rng);
            fragments(TRACE_ID, 1, design.trace_fragments, || {
                sample_mvn_raw(&center, &params.sigma_w, rng)
            })?
        }
    };
    EvidenceSet::new(trace, specific, alternative)
}

/// Flattens an evidence set back into a grouped dataset (trace fragments
/// join their source).
pub fn evidence_to_dataset(e: &EvidenceSet, feature_names: Vec<String>) -> Dataset {
    let mut groups: Vec<SourceGroup> = Vec::new();
    for f in e.specific().iter().chain(e.trace()) {
        match groups.iter_mut().find(|g| g.id == f.source) {
            Some(g) => g.fragments.push(f.clone()),
            None => groups.push(SourceGroup {
                id: f.source.clone(),
                fragments: vec![f.clone()],
            }),
        }
    }
    groups.extend(e.alternative().iter().cloned());
    Dataset {
        feature_names,
        groups,
    }
}

/// Priors used by the study pipelines.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyPriors {
    pub specific: SpecificPrior,
    pub alternative: AlternativePrior,
}

impl StudyPriors {
    /// Vague priors for unit-scale data: μ0 = 0, Λ0 = 100 I, ν = k + 2,
    /// Φ = 0.25 I for the within covariances and Φ_b = I.
    pub fn vague(k: usize) -> Self {
        let nu = k as f64 + 2.0;
        let lambda0 = SpdMatrix::scaled_identity(k, 100.0);
        StudyPriors {
            specific: SpecificPrior::new(
                MeanVector::zeros(k),
                lambda0.clone(),
                SpdMatrix::scaled_identity(k, 0.25),
                nu,
            )
            .expect("valid by construction"),
            alternative: AlternativePrior::new(
                MeanVector::zeros(k),
                lambda0,
                SpdMatrix::identity(k),
                nu,
                SpdMatrix::scaled_identity(k, 0.25),
                nu,
            )
            .expect("valid by construction"),
        }
    }
}

/// Sampler settings used by the study when none are given.
pub fn study_default_mcmc() -> McmcSettings {
    McmcSettings {
        iterations: 10_000,
        burn_in: 1_000,
        ..McmcSettings::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub replicate: usize,
    pub log_v_full: f64,
    pub log_v_plugin: f64,
    pub gap: f64,
}

/// Inputs to one study run.
#[derive(Debug, Clone)]
pub struct StudyPlan {
    pub params: TrueParams,
    pub base: DesignSpec,
    pub grid: Vec<usize>,
    pub replicates: usize,
    pub mcmc: McmcSettings,
    pub seed: u64,
    pub priors: StudyPriors,
}

impl StudyPlan {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::InvalidSettings("study grid is empty".into()));
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSettings(format!(
                "study grid must be strictly ascending, got {:?}",
                self.grid
            )));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidSettings("replicates must be at least 1".into()));
        }
        self.mcmc.validate()?;
        for &n in &self.grid {
            self.design(n).validate()?;
        }
        Ok(())
    }

    /// Base design with `n` sources, generated under M_p.
    pub fn design(&self, n: usize) -> DesignSpec {
        DesignSpec {
            sources: n,
            model: GeneratingModel::Prosecution,
            ..self.base
        }
    }

    /// The evidence of cell (grid[grid_index], replicate); a pure function
    /// of the plan.
    pub fn simulate_cell(&self, grid_index: usize, replicate: usize) -> Result<EvidenceSet> {
        let mut rng = RngStream::new(self.seed, streams::replicate(grid_index, replicate));
        simulate_evidence(&self.params, &self.design(self.grid[grid_index]), &mut rng)
    }

    fn run_cell(&self, grid_index: usize, replicate: usize) -> Result<ConvergenceRow> {
        let n = self.grid[grid_index];
        let annotate = |e: Error| Error::Study {
            n,
            replicate,
            source: Box::new(e),
        };
        let evidence = self.simulate_cell(grid_index, replicate).map_err(annotate)?;
        let mcmc = McmcSettings {
            seed: streams::replicate_seed(self.seed, grid_index, replicate),
            ..self.mcmc
        };
        let out = run_pipeline(
            &evidence,
            &self.priors.specific,
            &self.priors.alternative,
            &mcmc,
            Provenance::new("study", "", mcmc),
        )
        .map_err(annotate)?;
        let (full, plugin) = (out.report.full.log_v, out.report.plugin.log_v);
        Ok(ConvergenceRow {
            n,
            replicate,
            log_v_full: full,
            log_v_plugin: plugin,
            gap: (full - plugin).abs(),
        })
    }
}

/// Runs every (n, replicate) cell under M_p; rows come back sorted by
/// (n, replicate) whatever the scheduling.
pub fn convergence_study(
    params: &TrueParams,
    base: &DesignSpec,
    grid: &[usize],
    replicates: usize,
    mcmc: &McmcSettings,
    seed: u64,
) -> Result<Vec<ConvergenceRow>> {
    run_study(&StudyPlan {
        params: params.clone(),
        base: *base,
        grid: grid.to_vec(),
        replicates,
        mcmc: *mcmc,
        seed,
        priors: StudyPriors::vague(params.dim()),
    })
}

pub fn run_study(plan: &StudyPlan) -> Result<Vec<ConvergenceRow>> {
    plan.validate()?;
    let cells: Vec<(usize, usize)> = (0..plan.grid.len())
        .flat_map(|g| (0..plan.replicates).map(move |r| (g, r)))
        .collect();
    let mut rows = cells
        .par_iter()
        .map(|&(g, r)| plan.run_cell(g, r))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.n, r.replicate));
    Ok(rows)
}

/// Writes rows as CSV with a header.
pub fn write_convergence_csv<W: Write>(rows: &[ConvergenceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "replicate", "log_v_full", "log_v_plugin", "gap"])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.replicate.to_string(),
            fmt_f64(r.log_v_full),
            fmt_f64(r.log_v_plugin),
            fmt_f64(r.gap),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<study table>", e))?;
    Ok(())
}

/// Median of the gap per grid value, in grid order.
pub fn median_gaps(rows: &[ConvergenceRow]) -> Vec<(usize, f64)> {
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.dedup();
    ns.into_iter()
        .map(|n| {
            let mut gaps: Vec<f64> = rows.iter().filter(|r| r.n == n).map(|r| r.gap).collect();
            gaps.sort_by(f64::total_cmp);
            let mid = gaps.len() / 2;
            let median = if gaps.len() % 2 == 1 {
                gaps[mid]
            } else {
                0.5 * (gaps[mid - 1] + gaps[mid])
            };
            (n, median)
        })
        .collect()
}
