//! TOML run configuration.
//!
//! ```toml
//! [data]
//! path = "glass.csv"            # relative to this file
//! features = ["logCaK", "logCaSi", "logCaFe"]
//!
//! [scenario]
//! label = "scenario 1"
//! specific_source = "1"
//! specific_fragments = [1, 2, 3]
//! trace = { kind = "same-source", fragments = [4, 5] }
//!
//! [prior.specific]               # every key optional
//! lambda0 = 3000                 # scalar: multiple of I
//! phi = [0.01, 0.00005, 0.0005]  # list: diagonal
//! nu = 3                         # nested lists: full matrix
//!
//! [mcmc]
//! iterations = 30000
//! burn_in = 1000
//! seed = 20140101
//!
//! [output]
//! dir = "out"
//! format = "structured"          # or "text"
//! ```

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::evidence::{ColumnSchema, ScenarioSpec, TraceSelector};
use crate::samplers::{AlternativePrior, McmcSettings, SpecificPrior};
use crate::simulator::{study_default_mcmc, DesignSpec, GeneratingModel, StudyPlan, StudyPriors, TrueParams};
use crate::stats::{MeanVector, SpdMatrix};

/// A covariance given as a multiple of I, a diagonal, or in full.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Scaled(f64),
    Diagonal(Vec<f64>),
    Full(Vec<Vec<f64>>),
}

impl MatrixSpec {
    pub fn to_spd(&self, k: usize, what: &str) -> Result<SpdMatrix> {
        let bad = |msg: String| Error::Config(format!("{what}: {msg}"));
        let m = match self {
            MatrixSpec::Scaled(s) => DMatrix::identity(k, k) * *s,
            MatrixSpec::Diagonal(d) => {
                if d.len() != k {
                    return Err(bad(format!("diagonal has {} entries, expected {k}", d.len())));
                }
                DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d))
            }
            MatrixSpec::Full(rows) => {
                if rows.len() != k || rows.iter().any(|r| r.len() != k) {
                    return Err(bad(format!("matrix must be {k} x {k}")));
                }
                DMatrix::from_fn(k, k, |i, j| rows[i][j])
            }
        };
        SpdMatrix::new(m).map_err(|e| bad(e.to_string()))
    }
}

fn vector(v: &Option<Vec<f64>>, k: usize, what: &str, fallback: &MeanVector) -> Result<MeanVector> {
    match v {
        None => Ok(fallback.clone()),
        Some(x) if x.len() == k => MeanVector::from_slice(x),
        Some(x) => Err(Error::Config(format!("{what} has {} entries, expected {k}", x.len()))),
    }
}

fn matrix(m: &Option<MatrixSpec>, k: usize, what: &str, fallback: &SpdMatrix) -> Result<SpdMatrix> {
    match m {
        None => Ok(fallback.clone()),
        Some(spec) => spec.to_spd(k, what),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecificPriorSpec {
    pub mu0: Option<Vec<f64>>,
    pub lambda0: Option<MatrixSpec>,
    pub phi: Option<MatrixSpec>,
    pub nu: Option<f64>,
}

impl SpecificPriorSpec {
    pub fn resolve(&self, k: usize, fallback: &SpecificPrior) -> Result<SpecificPrior> {
        SpecificPrior::new(
            vector(&self.mu0, k, "prior.specific.mu0", &fallback.mu0)?,
            matrix(&self.lambda0, k, "prior.specific.lambda0", &fallback.lambda0)?,
            matrix(&self.phi, k, "prior.specific.phi", &fallback.phi)?,
            self.nu.unwrap_or(fallback.nu),
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlternativePriorSpec {
    pub mu0: Option<Vec<f64>>,
    pub lambda0: Option<MatrixSpec>,
    pub phi_b: Option<MatrixSpec>,
    pub nu_b: Option<f64>,
    pub phi_w: Option<MatrixSpec>,
    pub nu_w: Option<f64>,
}

impl AlternativePriorSpec {
    pub fn resolve(&self, k: usize, fallback: &AlternativePrior) -> Result<AlternativePrior> {
        AlternativePrior::new(
            vector(&self.mu0, k, "prior.alternative.mu0", &fallback.mu0)?,
            matrix(&self.lambda0, k, "prior.alternative.lambda0", &fallback.lambda0)?,
            matrix(&self.phi_b, k, "prior.alternative.phi_b", &fallback.phi_b)?,
            self.nu_b.unwrap_or(fallback.nu_b),
            matrix(&self.phi_w, k, "prior.alternative.phi_w", &fallback.phi_w)?,
            self.nu_w.unwrap_or(fallback.nu_w),
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorSection {
    #[serde(default)]
    pub specific: SpecificPriorSpec,
    #[serde(default)]
    pub alternative: AlternativePriorSpec,
}

impl PriorSection {
    /// Unset keys fall back to the glass-data priors when k = 3 and to
    /// [`StudyPriors::vague`] otherwise.
    pub fn resolve(&self, k: usize) -> Result<(SpecificPrior, AlternativePrior)> {
        let fallback = if k == 3 {
            StudyPriors {
                specific: SpecificPrior::glass_default(),
                alternative: AlternativePrior::glass_default(),
            }
        } else {
            StudyPriors::vague(k)
        };
        self.resolve_with(k, &fallback)
    }

    pub fn resolve_with(&self, k: usize, fallback: &StudyPriors) -> Result<(SpecificPrior, AlternativePrior)> {
        Ok((
            self.specific.resolve(k, &fallback.specific)?,
            self.alternative.resolve(k, &fallback.alternative)?,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub path: PathBuf,
    #[serde(default = "default_source_column")]
    pub source_column: String,
    #[serde(default = "default_fragment_column")]
    pub fragment_column: String,
    #[serde(default)]
    pub features: Option<Vec<String>>,
    #[serde(default)]
    pub log_transform: bool,
}

fn default_source_column() -> String {
    ColumnSchema::default().source_column
}

fn default_fragment_column() -> String {
    ColumnSchema::default().fragment_column
}

impl DataSection {
    pub fn schema(&self) -> ColumnSchema {
        ColumnSchema {
            source_column: self.source_column.clone(),
            fragment_column: self.fragment_column.clone(),
            features: self.features.clone(),
            log_transform: self.log_transform,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub h_p: Option<String>,
    #[serde(default)]
    pub h_d: Option<String>,
    pub specific_source: String,
    pub specific_fragments: Vec<usize>,
    pub trace: TraceSelector,
    #[serde(default)]
    pub excluded_sources: Vec<String>,
}

impl ScenarioSection {
    pub fn spec(&self) -> ScenarioSpec {
        ScenarioSpec {
            specific_source: self.specific_source.clone(),
            specific_fragments: self.specific_fragments.clone(),
            trace: self.trace.clone(),
            excluded_sources: self.excluded_sources.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Structured,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub format: ReportFormat,
    /// Also write the retained draws.
    pub draws: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("out"),
            format: ReportFormat::Structured,
            draws: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub mu_s: Option<Vec<f64>>,
    pub sigma_s: Option<MatrixSpec>,
    pub mu_a: Option<Vec<f64>>,
    pub sigma_b: Option<MatrixSpec>,
    pub sigma_w: Option<MatrixSpec>,
}

impl ParamsSpec {
    /// Unset keys take the study defaults; k comes from whichever mean is set.
    pub fn resolve(&self) -> Result<TrueParams> {
        let k = self
            .mu_s
            .as_ref()
            .or(self.mu_a.as_ref())
            .map_or(2, Vec::len);
        let d = if k == 2 {
            TrueParams::study_default()
        } else {
            TrueParams {
                mu_s: MeanVector::zeros(k),
                sigma_s: SpdMatrix::scaled_identity(k, 0.25),
                mu_a: MeanVector::zeros(k),
                sigma_b: SpdMatrix::identity(k),
                sigma_w: SpdMatrix::scaled_identity(k, 0.25),
            }
        };
        TrueParams::new(
            vector(&self.mu_s, k, "study.params.mu_s", &d.mu_s)?,
            matrix(&self.sigma_s, k, "study.params.sigma_s", &d.sigma_s)?,
            vector(&self.mu_a, k, "study.params.mu_a", &d.mu_a)?,
            matrix(&self.sigma_b, k, "study.params.sigma_b", &d.sigma_b)?,
            matrix(&self.sigma_w, k, "study.params.sigma_w", &d.sigma_w)?,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudySection {
    pub grid: Vec<usize>,
    pub replicates: usize,
    /// Defaults to `mcmc.seed`.
    pub seed: Option<u64>,
    pub fragments_per_source: usize,
    pub specific_fragments: usize,
    pub trace_fragments: usize,
    /// Sampler settings per cell; defaults to 10000 iterations, 1000 burn-in.
    pub mcmc: Option<McmcSettings>,
    pub params: ParamsSpec,
    pub output: String,
}

impl Default for StudySection {
    fn default() -> Self {
        StudySection {
            grid: vec![10, 50, 250],
            replicates: 20,
            seed: None,
            fragments_per_source: 5,
            specific_fragments: 3,
            trace_fragments: 2,
            mcmc: None,
            params: ParamsSpec::default(),
            output: "convergence.csv".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub data: Option<DataSection>,
    pub scenario: Option<ScenarioSection>,
    #[serde(default)]
    pub prior: PriorSection,
    #[serde(default)]
    pub mcmc: McmcSettings,
    #[serde(default)]
    pub output: OutputSection,
    pub study: Option<StudySection>,
    /// Directory relative paths are resolved against; not part of the file.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.base_dir = base_dir.into();
        cfg.mcmc.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, base)
    }

    pub fn resolve_path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn data_path(&self) -> Result<PathBuf> {
        let data = self.data.as_ref().ok_or_else(|| Error::Config("missing [data] section".into()))?;
        Ok(self.resolve_path(&data.path))
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve_path(&self.output.dir)
    }

    /// Hash of everything that determines the numbers: scenario, priors,
    /// sampler settings, column mapping and the data file's bytes. Output
    /// location and the data file's path are excluded.
    pub fn content_hash(&self, data_bytes: &[u8]) -> Result<String> {
        let mut table = toml::Table::new();
        let mut put = |key: &str, value: std::result::Result<toml::Value, toml::ser::Error>| -> Result<()> {
            let v = value.map_err(|e| Error::Config(e.to_string()))?;
            table.insert(key.to_string(), v);
            Ok(())
        };
        if let Some(d) = &self.data {
            let mut d = d.clone();
            d.path = PathBuf::new();
            put("data", toml::Value::try_from(d))?;
        }
        if let Some(s) = &self.scenario {
            put("scenario", toml::Value::try_from(s))?;
        }
        put("prior", toml::Value::try_from(&self.prior))?;
        put("mcmc", toml::Value::try_from(self.mcmc))?;
        if let Some(s) = &self.study {
            put("study", toml::Value::try_from(s))?;
        }
        let text = toml::to_string(&table).map_err(|e| Error::Config(e.to_string()))?;
        let mut h = Sha256::new();
        h.update(text.as_bytes());
        h.update(Sha256::digest(data_bytes));
        Ok(h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect())
    }

    pub fn study_plan(&self) -> Result<StudyPlan> {
        let s = self.study.as_ref().ok_or_else(|| Error::Config("missing [study] section".into()))?;
        let params = s.params.resolve()?;
        let k = params.dim();
        let (specific, alternative) = self.prior.resolve_with(k, &StudyPriors::vague(k))?;
        let plan = StudyPlan {
            params,
            base: DesignSpec {
                sources: s.grid.first().copied().unwrap_or(2),
                fragments_per_source: s.fragments_per_source,
                specific_fragments: s.specific_fragments,
                trace_fragments: s.trace_fragments,
                model: GeneratingModel::Prosecution,
            },
            grid: s.grid.clone(),
            replicates: s.replicates,
            mcmc: s.mcmc.unwrap_or_else(study_default_mcmc),
            seed: s.seed.unwrap_or(self.mcmc.seed),
            priors: StudyPriors { specific, alternative },
        };
        plan.validate()?;
        Ok(plan)
    }
}
