//! Command implementations behind the `sourcebf` binary.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::{ReportFormat, RunConfig};
use crate::diagnostics::{diagnose_table, Diagnostics};
use crate::error::{Error, Result};
use crate::evaluator::{run_pipeline, BayesFactorReport, PipelineOutput, Provenance};
use crate::evidence::{build_scenario, load_dataset};
use crate::samplers::drawset::{read_draw_table, Draw, DrawSet};
use crate::simulator::{evidence_to_dataset, median_gaps, run_study, write_convergence_csv, ConvergenceRow};
use crate::text::fmt_f64;

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  2  configuration error (unparsable or invalid config, bad scenario, invalid settings)
  3  data error (unreadable or malformed input files, unsuitable evidence)
  4  numerical error (factorization failure, non-finite values)
  5  internal error";

#[derive(Debug, Parser)]
#[command(name = "sourcebf", version, about = "Value of evidence for specific-source problems", after_help = EXIT_CODES)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one scenario: both values of evidence, draws and diagnostics.
    #[command(after_help = EXIT_CODES)]
    Evaluate {
        #[arg(long)]
        config: PathBuf,
        /// Override `mcmc.seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Override `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the plug-in vs full-Bayes convergence study from a `[study]` section.
    #[command(after_help = EXIT_CODES)]
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Also write every simulated dataset.
        #[arg(long)]
        emit_datasets: bool,
    },
    /// Per-parameter ESS, chain means and MC standard errors of a draw file.
    #[command(after_help = EXIT_CODES)]
    Diagnose {
        #[arg(long)]
        draws: PathBuf,
    },
}

/// Files produced by `evaluate`.
#[derive(Debug)]
pub struct EvaluateOutcome {
    pub report: BayesFactorReport,
    pub report_path: PathBuf,
    pub files: Vec<PathBuf>,
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn draws_text<D: Draw>(set: &DrawSet<D>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    set.write_columnar(&mut buf)?;
    Ok(buf)
}

fn diagnostics_of(bytes: &[u8]) -> Result<Diagnostics> {
    diagnose_table(&read_draw_table(bytes)?)
}

/// Loads the data named by `config`, builds the scenario and runs both
/// pipelines. Nothing is written.
pub fn evaluate_config(config: &RunConfig) -> Result<PipelineOutput> {
    let data_section = config.data.as_ref().ok_or_else(|| Error::Config("missing [data] section".into()))?;
    let scenario = config
        .scenario
        .as_ref()
        .ok_or_else(|| Error::Config("missing [scenario] section".into()))?;
    let data_path = config.data_path()?;
    let bytes = fs::read(&data_path).map_err(|e| Error::io(&data_path, e))?;
    let dataset = load_dataset(&bytes[..], &data_section.schema())?;
    let evidence = build_scenario(&dataset, &scenario.spec())?;
    let (specific_prior, alternative_prior) = config.prior.resolve(dataset.dim())?;

    let mut provenance = Provenance::new(
        scenario.label.clone().unwrap_or_else(|| "unnamed".into()),
        config.content_hash(&bytes)?,
        config.mcmc,
    );
    if let Some(h) = &scenario.h_p {
        provenance.hypothesis_p = h.clone();
    }
    if let Some(h) = &scenario.h_d {
        provenance.hypothesis_d = h.clone();
    }
    provenance.generated_at = Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    run_pipeline(&evidence, &specific_prior, &alternative_prior, &config.mcmc, provenance)
}

/// Everything is computed before the first file is written, so a failed
/// run leaves no partial report behind.
pub fn cmd_evaluate(config: &RunConfig, seed: Option<u64>, out: Option<&Path>) -> Result<EvaluateOutcome> {
    let mut config = config.clone();
    if let Some(s) = seed {
        config.mcmc.seed = s;
    }
    let output = evaluate_config(&config)?;
    let specific_text = draws_text(&output.specific_draws)?;
    let alternative_text = draws_text(&output.alternative_draws)?;
    let mut diagnostics = diagnostics_of(&specific_text)?.render_csv();
    diagnostics.push('\n');
    diagnostics.push_str(&diagnostics_of(&alternative_text)?.render_csv());
    let (report_name, report_text) = match config.output.format {
        ReportFormat::Structured => ("report.toml", output.report.render_structured()),
        ReportFormat::Text => ("report.txt", output.report.render_text()),
    };

    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| config.output_dir());
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut files = Vec::new();
    if config.output.draws {
        for (name, text) in [("draws_specific.csv", &specific_text), ("draws_alternative.csv", &alternative_text)] {
            let p = dir.join(name);
            write_file(&p, text)?;
            files.push(p);
        }
    }
    let p = dir.join("diagnostics.csv");
    write_file(&p, diagnostics.as_bytes())?;
    files.push(p);
    let report_path = dir.join(report_name);
    write_file(&report_path, report_text.as_bytes())?;
    files.push(report_path.clone());
    Ok(EvaluateOutcome {
        report: output.report,
        report_path,
        files,
    })
}

/// Runs the study and writes its table (and optionally every dataset).
pub fn cmd_simulate(config: &RunConfig, emit_datasets: bool) -> Result<(Vec<ConvergenceRow>, PathBuf)> {
    let plan = config.study_plan()?;
    let rows = run_study(&plan)?;
    let dir = config.output_dir();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    if emit_datasets {
        let ds_dir = dir.join("datasets");
        fs::create_dir_all(&ds_dir).map_err(|e| Error::io(&ds_dir, e))?;
        let names: Vec<String> = (1..=plan.params.dim()).map(|i| format!("x{i}")).collect();
        for (g, &n) in plan.grid.iter().enumerate() {
            for r in 0..plan.replicates {
                let evidence = plan.simulate_cell(g, r)?;
                let mut buf = Vec::new();
                evidence_to_dataset(&evidence, names.clone()).write_csv(&mut buf)?;
                write_file(&ds_dir.join(format!("n{n}_rep{r}.csv")), &buf)?;
            }
        }
    }
    let name = config.study.as_ref().map_or("convergence.csv", |s| s.output.as_str());
    let path = dir.join(name);
    let mut buf = Vec::new();
    write_convergence_csv(&rows, &mut buf)?;
    write_file(&path, &buf)?;
    Ok((rows, path))
}

pub fn cmd_diagnose(path: &Path) -> Result<Diagnostics> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    diagnose_table(&read_draw_table(std::io::BufReader::new(file))?)
}

/// Runs a parsed command line and returns what should go to stdout.
pub fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Evaluate { config, seed, out } => {
            let cfg = RunConfig::load(&config)?;
            let outcome = cmd_evaluate(&cfg, seed, out.as_deref())?;
            Ok(format!(
                "{}\nwrote {}\n",
                outcome.report.render_text(),
                outcome.report_path.display()
            ))
        }
        Command::Simulate { config, emit_datasets } => {
            let cfg = RunConfig::load(&config)?;
            let (rows, path) = cmd_simulate(&cfg, emit_datasets)?;
            let mut s = String::from("n,median_gap\n");
            for (n, g) in median_gaps(&rows) {
                s.push_str(&format!("{n},{}\n", fmt_f64(g)));
            }
            s.push_str(&format!("wrote {} rows to {}\n", rows.len(), path.display()));
            Ok(s)
        }
        Command::Diagnose { draws } => Ok(cmd_diagnose(&draws)?.render_csv()),
    }
}
